"""k-neighbour bootstrap percolation and noise-sensitivity instrumentation."""

__version__ = "0.1.0"
