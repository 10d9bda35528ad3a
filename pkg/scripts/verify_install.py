#!/usr/bin/env python3
"""
Verify WiperBench installation
Checks dependencies, module imports and the shipped firmware
"""
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))


def check_python_version():
    """Check Python version"""
    print("Checking Python version...", end=" ")
    if sys.version_info < (3, 11):
        print("FAIL")
        print(f"  Python 3.11+ required, found {sys.version}")
        return False
    print(f"OK (Python {sys.version.split()[0]})")
    return True


def check_dependencies():
    """Check required Python packages"""
    print("\nChecking Python dependencies...")
    required = [
        ('yaml', 'PyYAML'),
        ('dotenv', 'python-dotenv'),
        ('structlog', 'structlog'),
    ]

    all_ok = True
    for module_name, package_name in required:
        print(f"  {package_name}...", end=" ")
        try:
            __import__(module_name)
            print("OK")
        except ImportError:
            print("MISSING")
            all_ok = False

    return all_ok


def check_test_dependencies():
    """Check test tools; missing ones only matter for the test suite"""
    print("\nChecking test dependencies...")
    for module_name in ('pytest', 'hypothesis'):
        print(f"  {module_name}...", end=" ")
        try:
            __import__(module_name)
            print("OK")
        except ImportError:
            print("NOT INSTALLED (pip install -e .[test])")

    return True


def check_config_files():
    """Report which optional configuration files are present"""
    print("\nChecking configuration files...")

    project_dir = Path(__file__).parent.parent
    for path in (project_dir / ".env", project_dir / "config" / "config.yaml"):
        print(f"  {path.relative_to(project_dir)}...", end=" ")
        if path.exists():
            print("OK")
        else:
            print("not present (defaults apply)")

    print("  loading configuration...", end=" ")
    try:
        from wiperbench.config import Config
        config_file = project_dir / "config" / "config.yaml"
        config = Config(str(config_file) if config_file.exists() else None)
        overrides = len(config.sensor_defaults) + len(config.servo_defaults)
        print(f"OK ({overrides} sensor/servo overrides)")
    except Exception as e:
        print(f"FAIL: {e}")
        return False

    return True


def check_imports():
    """Check that WiperBench modules can be imported"""
    print("\nChecking WiperBench modules...")

    modules = [
        'wiperbench.config',
        'wiperbench.kernel.simulator',
        'wiperbench.kernel.export',
        'wiperbench.mcs51.cpu',
        'wiperbench.asm.assembler',
        'wiperbench.asm.hexfile',
        'wiperbench.peripherals.rain_sensor',
        'wiperbench.peripherals.servo',
        'wiperbench.harness.runner',
    ]

    all_ok = True
    for module in modules:
        print(f"  {module}...", end=" ")
        try:
            __import__(module)
            print("OK")
        except Exception as e:
            print(f"FAIL: {e}")
            all_ok = False

    return all_ok


def check_firmware():
    """Assemble the shipped firmware and compare it with its timing parameters"""
    print("\nChecking firmware...")

    from wiperbench.firmware import build_firmware, check_consistency

    print("  assembling wiper.a51...", end=" ")
    try:
        result = build_firmware()
    except Exception as e:
        print(f"FAIL: {e}")
        return False
    print(f"OK ({result.image.size} bytes, {len(result.warnings)} warnings)")

    print("  timing constants...", end=" ")
    problems = check_consistency(result)
    if problems:
        print("FAIL")
        for problem in problems:
            print(f"    {problem}")
        return False
    print("OK")
    return True


def main():
    """Main verification"""
    print("=" * 60)
    print("WiperBench Installation Verification")
    print("=" * 60)

    checks = [
        ("Python version", check_python_version),
        ("Dependencies", check_dependencies),
        ("Test dependencies", check_test_dependencies),
        ("Configuration files", check_config_files),
        ("Module imports", check_imports),
        ("Firmware", check_firmware),
    ]

    results = []
    for name, check_func in checks:
        try:
            result = check_func()
            results.append((name, result))
        except Exception as e:
            print(f"\nError during {name} check: {e}")
            results.append((name, False))

    # Summary
    print("\n" + "=" * 60)
    print("Summary")
    print("=" * 60)

    all_passed = True
    for name, result in results:
        status = "PASS" if result else "FAIL"
        print(f"  {name}: {status}")
        if not result:
            all_passed = False

    print()
    if all_passed:
        print("All checks passed! WiperBench is ready to run.")
        print("\nNext steps:")
        print("  1. Run the tests: pytest")
        print("  2. Check the scenarios: ./scripts/run.sh check scenarios/")
        return 0
    else:
        print("Some checks failed. Please fix the issues above.")
        return 1


if __name__ == '__main__':
    sys.exit(main())
