"""Physical-layer network coding: mapping, detection, capacity, chain forwarding and sync penalties."""

__version__ = "0.1.0"
