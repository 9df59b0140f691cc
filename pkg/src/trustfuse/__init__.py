"""Hybrid entity/data trust management for crowdsensed environmental monitoring.

Bayesian learning over discrete score levels yields per-user entity trust;
context-weighted Dempster-Shafer fusion of their observations yields
per-area data-trustworthiness vectors. A seeded epoch simulator, a
majority-baseline comparison scheme, and a sweep CLI round out the package.
"""

from .engine import HamsEngine
from .simulator import SimConfig, TrustLedger, run

__all__ = ["HamsEngine", "SimConfig", "TrustLedger", "run"]
__version__ = "0.1.0"
