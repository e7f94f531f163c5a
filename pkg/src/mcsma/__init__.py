"""Analysis and simulation of multi-channel CSMA random-access networks."""
__version__ = "0.1.0"
