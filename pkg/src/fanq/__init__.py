"""
fanq
Synthesis and verification of constant-depth quantum circuits with unbounded fan-out
"""

__version__ = "0.1.0"
__author__ = "fanq developers"
