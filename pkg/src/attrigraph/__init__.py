"""Per-class attribution graphs for convolutional image classifiers."""

__version__ = "0.1.0"
