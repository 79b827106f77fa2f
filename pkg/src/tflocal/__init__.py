"""Time-frequency localization operators on weighted modulation spaces, with a verification harness."""

__version__ = "0.1.0"
