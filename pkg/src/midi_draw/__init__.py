"""midi-draw: contour-conditioned 16-note melody generation."""

__version__ = "0.1.0"
