"""hetfuse - heterogeneous treatment effects from fused observational and trial data."""

__version__ = "0.1.0"
