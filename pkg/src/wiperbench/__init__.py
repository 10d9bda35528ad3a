"""
WiperBench - MCS-51 toolchain and co-simulation rig

Assembles 8051 firmware, runs it on a cycle-accurate emulator wired to
behavioral rain-sensor and servo models, and checks the servo PWM
protocol and wiper sweep timing against scripted rain scenarios.
"""

__version__ = "0.1.0"
__author__ = "WiperBench Contributors"
