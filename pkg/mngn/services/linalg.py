"""
Dense factorizations and null-space projections used by the solver steps.

- SVD of the Jacobian (orthonormal null-space path).
- GSVD of the pair (J, L) built from a QR of the stacked matrix followed by
  a cosine-sine split of the orthonormal factor.
- Orthogonal and oblique null-space projections, the latter through an LU
  factorization of Winv solved against two right-hand sides.
"""

import logging
import numpy as np
import scipy.linalg as sla
from mngn.exceptions import InvalidInputError, FactorizationError, DegeneratePairError
from mngn.schemas.linalg import SvdFactors, GsvdFactors, GsvdLayout, NullSpaceBasis, BasisKind

logger = logging.getLogger(__name__)

DEGENERATE_PAIR_TOL = 1e-10


def _as_matrix(A, name: str = "A") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise InvalidInputError(f"{name} must be a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return A


def svd(A) -> SvdFactors:
    """
    Full singular value decomposition A = U diag(sigma) V^T.

    - **Parameters:**
        - A: m x n finite matrix
    - **Raises:**
        - InvalidInputError if A is not a finite matrix
        - FactorizationError if LAPACK does not converge
    - **Returns:**
        - SvdFactors with U (m x m), sigma (nonincreasing, length min(m, n)) and V (n x n)
    """
    A = _as_matrix(A)
    try:
        U, sigma, Vt = sla.svd(A, full_matrices=True, lapack_driver="gesdd")
    except (np.linalg.LinAlgError, ValueError):
        logger.debug("gesdd failed, retrying with gesvd")
        try:
            U, sigma, Vt = sla.svd(A, full_matrices=True, lapack_driver="gesvd")
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise FactorizationError(f"SVD did not converge: {exc}")
    return SvdFactors(U=U, sigma=sigma, V=Vt.T)


def _complete_columns(known: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Fill the columns where `mask` is False with an orthonormal complement of the others."""
    out = known.copy()
    missing = np.flatnonzero(~mask)
    if missing.size == 0:
        return out
    if mask.any():
        complement = sla.null_space(known[:, mask].T)
    else:
        complement = np.eye(known.shape[0])
    out[:, missing] = complement[:, :missing.size]
    return out


def gsvd(J, L) -> GsvdFactors:
    """
    Generalized singular value decomposition of the matrix pair (J, L).

    - **Parameters:**
        - J: m x n matrix
        - L: p x n matrix with p <= n and m + p >= n
    - **Raises:**
        - InvalidInputError on shape violations or non-finite entries
        - DegeneratePairError if N(J) and N(L) intersect nontrivially
        - FactorizationError if an inner factorization fails
    - **Returns:**
        - GsvdFactors with c ascending and s descending, c_i^2 + s_i^2 = 1
    """
    J = _as_matrix(J, "J")
    L = _as_matrix(L, "L")
    m, n = J.shape
    p = L.shape[0]
    if L.shape[1] != n:
        raise InvalidInputError(f"J and L must have the same number of columns ({n} != {L.shape[1]})")
    if p > n:
        raise InvalidInputError(f"L has more rows than columns ({p} > {n}); reduce it with a compact QR first")
    if m + p < n:
        raise DegeneratePairError(f"m + p = {m + p} < n = {n}: the stacked matrix cannot have full column rank")

    stacked = np.vstack([J, L])
    try:
        Q, R = sla.qr(stacked, mode="economic")
        stacked_sv = sla.svdvals(R)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise FactorizationError(f"QR of the stacked pair failed: {exc}")
    if stacked_sv[-1] < DEGENERATE_PAIR_TOL * stacked_sv[0]:
        raise DegeneratePairError("N(J) and N(L) intersect: the stacked matrix [J; L] is rank deficient")

    Q1, Q2 = Q[:m], Q[m:]
    q1 = svd(Q1)
    # LAPACK returns descending values; reversing gives the ascending c ordering
    # with N(J) first. Columns beyond min(m, n) carry c = 0.
    Z = q1.V[:, ::-1]
    sigma = q1.sigma
    c = np.concatenate([np.zeros(n - sigma.size), sigma[::-1]])
    c = np.clip(c, 0.0, 1.0)

    if m >= n:
        U = np.hstack([q1.U[:, :n][:, ::-1], q1.U[:, n:]])
    else:
        U = q1.U[:, ::-1]

    Q2Z = Q2 @ Z
    s = np.linalg.norm(Q2Z, axis=0)
    V = np.zeros((p, p))
    usable = np.zeros(p, dtype=bool)
    if p:
        head = s[:p]
        usable = head > 10 * np.finfo(float).eps
        V[:, usable] = Q2Z[:, :p][:, usable] / head[usable]
        V = _complete_columns(V, usable)

    Winv = Z.T @ R
    return GsvdFactors(
        U=U, V=V, Winv=Winv, c=c, s=s,
        layout=GsvdLayout(m=m, n=n, p=p, d=n - p),
    )


def orthogonal_null_projection(basis: NullSpaceBasis, v) -> np.ndarray:
    """
    Project v onto span(basis.columns) with the orthogonal projector C C^T.

    - **Raises:**
        - InvalidInputError if the basis is not orthonormal or dimensions differ
    """
    if basis.kind != BasisKind.orthonormal:
        raise InvalidInputError("orthogonal projection needs an orthonormal basis")
    v = np.asarray(v, dtype=float)
    C = basis.columns
    if v.shape != (C.shape[0],):
        raise InvalidInputError(f"vector of shape {v.shape} does not match basis of size {C.shape[0]}")
    if C.shape[1] == 0:
        return np.zeros_like(v)
    return C @ (C.T @ v)


def oblique_null_projection_and_step(
    factors: GsvdFactors,
    x_minus_xbar,
    y_tail,
    rank: int,
    lu=None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Solve Winv [t, s_tilde] = [[W1hat (x - xbar), 0], [0, y_tail]] with one LU factorization.

    t = W1 W1hat (x - xbar) is the oblique null-space correction and s_tilde
    the minimal-L-norm Gauss-Newton step.

    - **Parameters:**
        - factors: GSVD of (J, L)
        - x_minus_xbar: current iterate minus model profile
        - y_tail: last `rank` entries of the transformed step
        - rank: estimated rank of J
        - lu: optional precomputed `scipy.linalg.lu_factor(factors.Winv)`
    - **Raises:**
        - InvalidInputError on dimension mismatch
        - FactorizationError if Winv is singular
    """
    n = factors.layout.n
    x_minus_xbar = np.asarray(x_minus_xbar, dtype=float)
    y_tail = np.asarray(y_tail, dtype=float)
    if not 0 <= rank <= n:
        raise InvalidInputError(f"rank {rank} outside [0, {n}]")
    if x_minus_xbar.shape != (n,) or y_tail.shape != (rank,):
        raise InvalidInputError("dimension mismatch in the two right-hand sides")
    k = n - rank
    rhs = np.zeros((n, 2))
    rhs[:k, 0] = factors.Winv[:k] @ x_minus_xbar
    rhs[k:, 1] = y_tail
    if lu is None:
        lu = factor_winv(factors)
    sol = sla.lu_solve(lu, rhs)
    return sol[:, 0], sol[:, 1]


def factor_winv(factors: GsvdFactors):
    try:
        with np.errstate(all="raise"):
            lu = sla.lu_factor(factors.Winv, check_finite=True)
    except (np.linalg.LinAlgError, ValueError, FloatingPointError) as exc:
        raise FactorizationError(f"LU of Winv failed: {exc}")
    if np.any(np.diag(lu[0]) == 0):
        raise FactorizationError("Winv is singular")
    return lu


def oblique_null_basis(factors: GsvdFactors, rank: int, lu=None) -> NullSpaceBasis:
    """Columns W1 (first n - rank columns of W) and rows W1hat of Winv."""
    n = factors.layout.n
    k = n - rank
    if lu is None:
        lu = factor_winv(factors)
    columns = sla.lu_solve(lu, np.eye(n)[:, :k]) if k else np.zeros((n, 0))
    return NullSpaceBasis(columns=columns, kind=BasisKind.oblique, rows=factors.Winv[:k].copy())


def orthogonal_null_basis(factors: SvdFactors, rank: int) -> NullSpaceBasis:
    return NullSpaceBasis(columns=factors.V[:, rank:], kind=BasisKind.orthonormal)
