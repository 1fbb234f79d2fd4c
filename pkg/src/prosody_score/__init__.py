"""Feature extraction and scoring for read-aloud spoken English."""

__version__ = "0.1.0"
