"""Two-stage fourth-order GRP finite-volume solvers for hyperbolic conservation laws."""

__version__ = "0.1.0"
