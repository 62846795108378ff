"""Episodic long-term memory engine with a competition test harness."""

__version__ = "0.1.0"
