"""
Setup script for WiperBench
"""
from setuptools import setup, find_packages
from pathlib import Path

# Read README
readme_file = Path(__file__).parent / "README.md"
long_description = readme_file.read_text() if readme_file.exists() else ""

setup(
    name="wiperbench",
    version="0.1.0",
    description="MCS-51 toolchain and co-simulation rig for a rain-sensing wiper controller",
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="WiperBench Contributors",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    package_data={"wiperbench.firmware": ["*.a51"]},
    python_requires=">=3.10",
    install_requires=[
        "pyyaml>=6.0.1",
        "python-dotenv>=1.0.0",
        "structlog>=24.1.0",
    ],
    extras_require={
        "test": [
            "pytest>=7.4",
            "hypothesis>=6.90",
        ],
    },
    entry_points={
        "console_scripts": [
            "wiperbench=wiperbench.main:main",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Developers",
        "Topic :: Software Development :: Embedded Systems",
        "Topic :: Software Development :: Assemblers",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],
)
