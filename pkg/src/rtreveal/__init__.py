"""Response-time based identification for binary response models."""

__version__ = "0.1.0"
