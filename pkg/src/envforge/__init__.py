"""envforge: generate, judge, calibrate, and serve verifiable reasoning environments."""

__version__ = "0.1.0"
