"""Synthetic series generators used as independent test oracles."""

import numpy as np


def garch11(n: int, alpha: float = 0.1, beta: float = 0.85,
            omega: float | None = None, seed: int = 0,
            burn_in: int = 1000) -> np.ndarray:
    """GARCH(1,1) returns with standard-normal innovations.

    omega defaults to 1 - alpha - beta so the unconditional variance is 1.
    Volatility clustering in the output is the detector-power oracle: the
    autocorrelation of absolute values must be clearly positive.
    """
    if omega is None:
        omega = 1.0 - alpha - beta
    rng = np.random.default_rng(seed)
    shocks = rng.standard_normal(n + burn_in)
    returns = np.empty(n + burn_in)
    variance = omega / (1.0 - alpha - beta)
    for t in range(n + burn_in):
        if t > 0:
            variance = omega + alpha * returns[t - 1] ** 2 + beta * variance
        returns[t] = np.sqrt(variance) * shocks[t]
    return returns[burn_in:]
