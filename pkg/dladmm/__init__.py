"""dladmm: backward/forward ADMM training for fully-connected networks, with diagnostics and baselines."""

__version__ = "1.0.0"
__author__ = "dladmm Team"
