"""
Iteration drivers for the minimal-norm Gauss-Newton family.

The update is x_{k+1} = x_k + alpha_k s_k - beta_k t_k, where s_k is the
(truncated) minimal-norm Gauss-Newton step and t_k the component of
x_k - xbar in the null space of the Jacobian. The method variants differ in
how alpha_k, beta_k and the rank are chosen:

- mngn: Armijo alpha on s, beta = 1, fixed rank.
- mngn2-a: Armijo alpha on s - t, beta = alpha.
- mngn2-ab / mngn2-abd: Armijo alpha, beta from the accept/halve/double
  loop with a fixed (eta rho) or adaptive (rho^eta) residual increase.
- ckb1/ckb2 and rckb1/rckb2: undamped step with a prescribed gamma_k
  sequence, without / with rank estimation.

With a regularizer L the GSVD of (J, L) replaces the SVD and the oblique
projector W1 W1hat replaces V2 V2^T.
"""

import logging
from typing import Callable, Optional
import numpy as np
from mngn import config
from mngn.exceptions import InconsistentRankError, InvalidInputError, SolverError
from mngn.schemas.linalg import GsvdFactors, NullSpaceBasis, SvdFactors
from mngn.schemas.relaxation import BetaState, EtaState
from mngn.schemas.solver import FailureReason, IterationRecord, Method, Problem, SolveOptions, SolveResult
from mngn.services import linalg
from mngn.services.problems import compact_qr_reduce, jacobian_at
from mngn.services.rank import estimate_rank_gsvd, estimate_rank_svd
from mngn.services.relaxation import (
    armijo_goldstein, push_residual, residual_increase, select_beta, update_eta,
)

logger = logging.getLogger(__name__)


def min_norm_step(
    J, r, x, xbar, rank: int, factors: Optional[SvdFactors] = None,
) -> tuple[np.ndarray, np.ndarray, NullSpaceBasis]:
    """
    Truncated minimal-norm Gauss-Newton step and orthogonal null-space correction.

    s_tilde = -sum_{i <= rank} (u_i^T r / sigma_i) v_i and t = V2 V2^T (x - xbar),
    with V2 the trailing n - rank right singular vectors.

    - **Raises:**
        - InvalidInputError if rank is outside [0, min(m, n)]
        - InconsistentRankError if one of the leading `rank` singular values is zero
    """
    J = np.asarray(J, dtype=float)
    factors = factors or linalg.svd(J)
    q = factors.sigma.size
    if not 0 <= rank <= q:
        raise InvalidInputError(f"rank {rank} outside [0, {q}]")
    sigma = factors.sigma[:rank]
    if np.any(sigma <= 0):
        raise InconsistentRankError(f"zero singular value among the leading {rank}")

    g = factors.U.T @ np.asarray(r, dtype=float)
    s_tilde = -factors.V[:, :rank] @ (g[:rank] / sigma)
    basis = linalg.orthogonal_null_basis(factors, rank)
    t = linalg.orthogonal_null_projection(basis, np.asarray(x, dtype=float) - np.asarray(xbar, dtype=float))
    return s_tilde, t, basis


def min_L_norm_step(
    J, L, r, x, xbar, rank: int, factors: Optional[GsvdFactors] = None,
) -> tuple[np.ndarray, np.ndarray, NullSpaceBasis]:
    """
    Minimal-L-norm step and oblique null-space correction from the GSVD of (J, L).

    The transformed step is y_j = -g_{j - offset} / c_j on the last `rank`
    positions (offset = max(0, n - m)), and both s_tilde = W y and
    t = W1 W1hat (x - xbar) come from one LU factorization of Winv.
    """
    factors = factors or linalg.gsvd(J, L)
    lay = factors.layout
    if not 0 <= rank <= lay.q:
        raise InvalidInputError(f"rank {rank} outside [0, {lay.q}]")
    cols = np.arange(lay.n - rank, lay.n)
    c = factors.c[cols]
    if np.any(c <= 0):
        raise InconsistentRankError(f"zero c-value among the trailing {rank}")

    g = factors.U.T @ np.asarray(r, dtype=float)
    y_tail = -g[cols - lay.row_offset] / c
    lu = linalg.factor_winv(factors)
    x_minus_xbar = np.asarray(x, dtype=float) - np.asarray(xbar, dtype=float)
    t, s_tilde = linalg.oblique_null_projection_and_step(factors, x_minus_xbar, y_tail, rank, lu=lu)
    basis = linalg.oblique_null_basis(factors, rank, lu=lu)
    return s_tilde, t, basis


def ckb_gamma(k: int, variant: int) -> float:
    """gamma_k = 0.5^(k+1) (variant 1) or 0.5^(2^k) (variant 2)."""
    if k < 0:
        raise InvalidInputError("k must be nonnegative")
    if variant == 1:
        return 0.5 ** (k + 1)
    if variant == 2:
        return 0.5 ** float(2 ** min(k, 64))
    raise InvalidInputError(f"unknown CKB variant {variant}")


def ckb_step(x, s_tilde, t, gamma: float) -> np.ndarray:
    return x + s_tilde - gamma * t


def ckb_convex_step(x, s_tilde, t, gamma: float) -> np.ndarray:
    """Convex combination of the Gauss-Newton point and its projected counterpart."""
    gn = x + s_tilde
    return (1.0 - gamma) * gn + gamma * (gn - t)


def check_convergence(x_prev, x_next, alpha_stilde_norm: float, tol: float) -> bool:
    step = np.linalg.norm(np.asarray(x_next) - np.asarray(x_prev))
    return bool(step < tol * np.linalg.norm(x_next) or alpha_stilde_norm < tol)


def _residual_norm_fn(problem: Problem) -> Callable[[np.ndarray], float]:
    def residual_norm_at(z: np.ndarray) -> float:
        with np.errstate(all="ignore"):
            value = problem.r(z)
        if not np.all(np.isfinite(value)):
            return float("inf")
        return float(np.linalg.norm(value))
    return residual_norm_at


def _vector(v, n: int, name: str) -> np.ndarray:
    v = np.array(v, dtype=float)
    if v.shape != (n,):
        raise InvalidInputError(f"{name} must have length {n}, got shape {v.shape}")
    return v


def solve(problem: Problem, x0, options: Optional[SolveOptions] = None) -> SolveResult:
    """
    Run one solve from x0.

    Factorization failures and non-finite iterates end the run with
    `failure_reason` set; they are never raised. Inconsistent inputs
    (wrong x0, model profile or regularizer dimensions) raise InvalidInputError.
    """
    options = options or SolveOptions()
    method = options.method
    m, n = problem.m, problem.n
    x = _vector(x0, n, "x0")
    xbar = np.zeros(n) if options.model_profile is None else _vector(options.model_profile, n, "model_profile")
    if method.ckb_variant is not None:
        # The convex-combination iteration projects x itself.
        xbar = np.zeros(n)

    L = None
    if options.regularizer is not None:
        L = np.asarray(options.regularizer, dtype=float)
        if L.shape[1] != n:
            raise InvalidInputError(f"regularizer must have {n} columns, got {L.shape[1]}")
        L = compact_qr_reduce(L)

    residual_norm_at = _residual_norm_fn(problem)
    eta_state: Optional[EtaState] = None
    if method.uses_beta_loop:
        eta_state = EtaState(
            eta=options.fixed_eta if method == Method.mngn2_ab else config.ETA_INIT,
            log_base=options.log_base,
        )
    beta_state = BetaState()

    trace: list[IterationRecord] = []
    converged = False
    failure: Optional[FailureReason] = None
    last_exhausted = False

    for k in range(options.max_iter):
        with np.errstate(all="ignore"):
            r = problem.r(x)
            J = jacobian_at(problem, x)
        if J.shape != (m, n):
            raise InvalidInputError(f"Jacobian has shape {J.shape}, expected {(m, n)}")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(J))):
            failure = FailureReason.diverged
            break

        try:
            if L is None:
                factors = linalg.svd(J)
                rank = (estimate_rank_svd(factors.sigma, options.rank_params)
                        if method.estimates_rank else factors.sigma.size)
                s_tilde, t, _ = min_norm_step(J, r, x, xbar, rank, factors=factors)
            else:
                factors = linalg.gsvd(J, L)
                rank = (estimate_rank_gsvd(factors.rank_candidates(), factors.layout.d, options.rank_params)
                        if method.estimates_rank else factors.layout.q)
                s_tilde, t, _ = min_L_norm_step(J, L, r, x, xbar, rank, factors=factors)
        except SolverError as exc:
            logger.warning("iteration %d: %s", k, exc)
            failure = FailureReason.factorization_error
            break

        r_norm_sq = float(r @ r)
        Js_norm_sq = float(np.sum((J @ s_tilde) ** 2))
        alpha, beta = 1.0, 1.0
        last_exhausted = False

        if method == Method.mngn:
            alpha, last_exhausted = armijo_goldstein(residual_norm_at, x, s_tilde, Js_norm_sq, r_norm_sq)
            x_next = x + alpha * s_tilde - t
            rho_next = residual_norm_at(x_next)
        elif method == Method.mngn2_a:
            alpha, last_exhausted = armijo_goldstein(residual_norm_at, x, s_tilde - t, Js_norm_sq, r_norm_sq)
            beta = alpha
            x_next = x + alpha * (s_tilde - t)
            rho_next = residual_norm_at(x_next)
        elif method.uses_beta_loop:
            alpha, last_exhausted = armijo_goldstein(residual_norm_at, x, s_tilde, Js_norm_sq, r_norm_sq)
            x_tilde = x + alpha * s_tilde
            rho_tilde = residual_norm_at(x_tilde)
            if method == Method.mngn2_abd:
                eta_state = update_eta(eta_state, k)
            eta, mode = eta_state.eta, options.delta_mode
            beta_state, x_next, rho_next, _ = select_beta(
                beta_state, x_tilde, t, residual_norm_at,
                lambda rho: residual_increase(rho, eta, mode),
                rho_tilde=rho_tilde,
            )
            eta_state = push_residual(eta_state, rho_tilde)
            beta = beta_state.beta
        else:
            beta = ckb_gamma(k, method.ckb_variant)
            x_next = ckb_step(x, s_tilde, t, beta)
            rho_next = residual_norm_at(x_next)

        if not (np.all(np.isfinite(x_next)) and np.isfinite(rho_next)):
            failure = FailureReason.diverged
            break

        step_norm = alpha * float(np.linalg.norm(s_tilde))
        offset = x_next - xbar
        trace.append(IterationRecord(
            k=k,
            alpha=alpha,
            beta=beta,
            eta=None if eta_state is None else eta_state.eta,
            rank=rank,
            residual_norm=rho_next,
            solution_norm=float(np.linalg.norm(offset if L is None else L @ offset)),
            step_norm=step_norm,
            iterate=x_next.tolist() if options.keep_iterates else None,
        ))
        logger.debug("k=%d rank=%d alpha=%.3g beta=%.3g |r|=%.3e", k, rank, alpha, beta, rho_next)

        done = check_convergence(x, x_next, step_norm, options.stop_tol)
        x = x_next
        if done:
            converged = True
            break
    else:
        failure = FailureReason.line_search_exhausted if last_exhausted else FailureReason.max_iter

    if converged:
        logger.info("%s converged in %d iterations", method.value, len(trace))
    else:
        logger.info("%s stopped after %d iterations: %s", method.value, len(trace), failure.value)
    return SolveResult(
        x_final=x,
        converged=converged,
        iterations=len(trace),
        trace=trace,
        failure_reason=failure,
    )
