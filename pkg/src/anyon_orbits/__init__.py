"""Classical, group-theoretic and semiclassical tools for harmonically confined anyons."""

__version__ = "0.1.0"
