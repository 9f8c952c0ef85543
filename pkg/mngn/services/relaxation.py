"""
Step-length controllers of the doubly relaxed iteration.

- Armijo-Goldstein backtracking for the Gauss-Newton damping alpha.
- Accept/halve/double loop for the projection step length beta.
- Regression-driven update of the residual-increase exponent eta.
"""

import logging
from functools import lru_cache
from typing import Callable
import numpy as np
from mngn import config
from mngn.schemas.relaxation import BetaState, DeltaMode, EtaState, LogBase

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
ARMIJO_MU = 0.25


def armijo_goldstein(
    residual_norm_at: Callable[[np.ndarray], float],
    x: np.ndarray,
    s: np.ndarray,
    Js_norm_sq: float,
    r_norm_sq: float,
    max_halvings: int = config.ARMIJO_MAX_HALVINGS,
) -> tuple[float, bool]:
    """
    Largest alpha = 2^-i, i = 0..max_halvings, with
    ||r(x)||^2 - ||r(x + alpha s)||^2 >= alpha ||J s||^2 / 2.

    Returns (alpha, exhausted). When no power passes the test the smallest
    one is returned with exhausted=True. Non-finite trial residuals fail.
    """
    alpha = 1.0
    for i in range(max_halvings + 1):
        alpha = 2.0 ** (-i)
        trial = residual_norm_at(x + alpha * s)
        if np.isfinite(trial) and r_norm_sq - trial ** 2 >= 2.0 * ARMIJO_MU * alpha * Js_norm_sq:
            return alpha, False
    logger.warning("Armijo-Goldstein exhausted after %d halvings", max_halvings)
    return alpha, True


def residual_increase(rho: float, eta: float, mode: DeltaMode) -> float:
    """
    Allowed residual growth: eta * rho (fixed) or rho ** eta (adaptive).

    In adaptive mode a residual of at least 1 uses rho ** -eta, so the
    allowance never exceeds 1 and a larger eta always tightens the test.
    """
    if mode == DeltaMode.fixed:
        return eta * rho
    if rho >= 1.0:
        return rho ** -eta
    return rho ** eta


@lru_cache(maxsize=None)
def _normal_equations(k_res: int) -> np.ndarray:
    j = np.arange(1, k_res + 1, dtype=float)
    return np.array([[j @ j, j.sum()], [j.sum(), float(k_res)]])


def regression_slope(history, log_base: LogBase = LogBase.base10) -> float:
    """Least-squares slope of log(theta_j) against j = 1..len(history)."""
    theta = np.asarray(history, dtype=float)
    theta = np.where(theta > 0, theta, EPS)
    logs = np.log(theta) if log_base == LogBase.natural else np.log10(theta)
    j = np.arange(1, theta.size + 1, dtype=float)
    rhs = np.array([j @ logs, logs.sum()])
    slope, _intercept = np.linalg.solve(_normal_equations(theta.size), rhs)
    return float(slope)


def update_eta(state: EtaState, k: int) -> EtaState:
    """
    Adapt eta from the trend of the last k_res residuals.

    A flat trend (slope above slope_min) doubles eta up to ETA_MAX, a steep
    one (slope below slope_max) halves it. Before k_res residuals exist the
    state is returned unchanged.
    """
    if k < state.k_res or len(state.residual_history) < state.k_res:
        return state
    slope = regression_slope(state.residual_history[-state.k_res:], state.log_base)
    eta = state.eta
    if slope > state.slope_min:
        eta = min(2.0 * eta, max(eta, config.ETA_MAX))
    elif slope < state.slope_max:
        eta /= 2.0
    if eta != state.eta:
        logger.debug("eta %.4g -> %.4g (slope %.4g)", state.eta, eta, slope)
    return state.model_copy(update={"eta": eta, "slope": slope})


def push_residual(state: EtaState, rho: float) -> EtaState:
    history = (state.residual_history + [float(rho)])[-state.k_res:]
    return state.model_copy(update={"residual_history": history})


def select_beta(
    state: BetaState,
    x_tilde: np.ndarray,
    t: np.ndarray,
    residual_norm_at: Callable[[np.ndarray], float],
    delta: Callable[[float], float],
    rho_tilde: float | None = None,
) -> tuple[BetaState, np.ndarray, float, bool]:
    """
    Choose the projection step length and the next iterate.

    beta is doubled first when below 1, then halved until
    ||r(x_tilde - beta t)|| <= rho + delta(rho) with rho = ||r(x_tilde)|| + eps.
    Halving stops before beta reaches the floor; if the test still fails the
    last trial point is kept, beta stays at its smallest value and the
    suppressed flag is raised.

    - **Returns:**
        - (state, x_next, ||r(x_next)||, projection_suppressed)
    """
    beta = state.beta
    if beta < 1.0:
        beta *= 2.0
    if rho_tilde is None:
        rho_tilde = residual_norm_at(x_tilde)
    rho = rho_tilde + EPS
    bound = rho + delta(rho)

    x_next = x_tilde - beta * t
    rho_next = residual_norm_at(x_next)
    while not rho_next <= bound and beta / 2.0 > config.BETA_FLOOR:
        beta /= 2.0
        x_next = x_tilde - beta * t
        rho_next = residual_norm_at(x_next)

    suppressed = not rho_next <= bound
    if suppressed:
        logger.warning("projection suppressed at beta=%.3g", beta)
        if not np.isfinite(rho_next):
            return BetaState(beta=beta), x_tilde.copy(), rho_tilde, True
    return BetaState(beta=beta), x_next, rho_next, suppressed
