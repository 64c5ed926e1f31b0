"""Symbolic verifier for concurrent stochastic games over a lossy FIFO
channel: qualitative winning regions on regular state sets, core-based
rational verification, finitely represented strategies, and Monte Carlo
cross-validation."""

__version__ = "0.1.0"

from . import arena, cli, conjunction, core, modelio, models, regset, sim, \
    strategy, zerosum

__all__ = ["arena", "cli", "conjunction", "core", "modelio", "models",
           "regset", "sim", "strategy", "zerosum", "__version__"]
