"""
Built-in test problems, derivative-operator regularizers and Jacobian checks.

Every factory returns a `TestProblem` wrapping a `Problem` with an analytic
Jacobian and, where it is known in closed form, the minimal-norm solution.
All problems fit F(x) = 0 (b = 0).
"""

import logging
from typing import Callable, Dict, List, Optional
import numpy as np
import scipy.linalg as sla
from scipy.optimize import brentq
from mngn import config
from mngn.exceptions import InvalidInputError
from mngn.schemas.problems import CheckResult, ProblemId, ProblemParams, RegularizerKind, RegularizerSpec, TestProblem
from mngn.schemas.solver import Problem

logger = logging.getLogger(__name__)

ROBOT_TARGET = (3.0, 3.0)
ROBOT_ARM = 2.0
ROBOT_OFFSET = 10.0

FD_TOL = 1e-6
SOLUTION_TOL = 1e-8
NORM_TOL = 1e-4
# Published minimal norm of the paraboloid problem.
PARABOLOID_NORM = 3.681558


def make_robot(params: Optional[ProblemParams] = None) -> TestProblem:
    """Inverse position kinematics of a redundant parallel robot, F: R^4 -> R^2."""
    X, Y = ROBOT_TARGET
    A, H = ROBOT_ARM, ROBOT_OFFSET

    def residual(x):
        return np.array([
            (X - A * np.cos(x[0])) ** 2 + (Y - A * np.sin(x[0])) ** 2 - x[1] ** 2,
            (X - A * np.cos(x[2]) - H) ** 2 + (Y - A * np.sin(x[2])) ** 2 - x[3] ** 2,
        ])

    def jacobian(x):
        J = np.zeros((2, 4))
        J[0, 0] = 2 * A * (X - A * np.cos(x[0])) * np.sin(x[0]) - 2 * A * (Y - A * np.sin(x[0])) * np.cos(x[0])
        J[0, 1] = -2 * x[1]
        J[1, 2] = 2 * A * (X - A * np.cos(x[2]) - H) * np.sin(x[2]) - 2 * A * (Y - A * np.sin(x[2])) * np.cos(x[2])
        J[1, 3] = -2 * x[3]
        return J

    return TestProblem(
        name=ProblemId.robot,
        problem=Problem(m=2, n=4, residual=residual, jacobian=jacobian),
        params=params or ProblemParams(m=2, n=4),
    )


def _paraboloid_optimum() -> np.ndarray:
    # Stationarity of ||x||^2 on the surface: x = mu * grad F.
    def condition(mu):
        return 1.0 / (1 + 2 * mu) ** 2 + 8.0 / (1 + 4 * mu) ** 2 + 3.0 - mu

    mu = brentq(condition, 3.0, 4.0, xtol=1e-15)
    return np.array([2 * mu / (1 + 2 * mu), 8 * mu / (1 + 4 * mu), mu])


def make_paraboloid(params: Optional[ProblemParams] = None) -> TestProblem:
    """Elliptic paraboloid x3 = (x1 - 1)^2 + 2 (x2 - 2)^2 + 3, F: R^3 -> R."""

    def residual(x):
        return np.array([x[2] - (x[0] - 1) ** 2 - 2 * (x[1] - 2) ** 2 - 3])

    def jacobian(x):
        return np.array([[-2 * (x[0] - 1), -4 * (x[1] - 2), 1.0]])

    x_dagger = _paraboloid_optimum()
    return TestProblem(
        name=ProblemId.paraboloid,
        problem=Problem(m=1, n=3, residual=residual, jacobian=jacobian),
        params=params or ProblemParams(m=1, n=3),
        known_solution=x_dagger,
        known_norm=PARABOLOID_NORM,
    )


def make_circle2d(delta: float = 0.75, gamma: float = 2.0) -> TestProblem:
    """Circle of radius 1/delta centred at (gamma, gamma), F: R^2 -> R."""
    if delta == 0:
        raise InvalidInputError("delta must be nonzero")
    center = np.array([gamma, gamma], dtype=float)
    d2 = delta ** 2

    def residual(x):
        return np.array([d2 * ((x[0] - gamma) ** 2 + (x[1] - gamma) ** 2) - 1.0])

    def jacobian(x):
        return (2 * d2 * (np.asarray(x, dtype=float) - center)).reshape(1, 2)

    x_dagger, known_norm = None, None
    c_norm = np.linalg.norm(center)
    if c_norm > 0:
        x_dagger = center * (1.0 - 1.0 / (abs(delta) * c_norm))
        known_norm = float(abs(c_norm - 1.0 / abs(delta)))

    return TestProblem(
        name=ProblemId.circle2d,
        problem=Problem(m=1, n=2, residual=residual, jacobian=jacobian),
        params=ProblemParams(m=1, n=2, delta=delta, gamma=gamma),
        known_solution=x_dagger,
        known_norm=known_norm,
    )


def _shape_vectors(m: int, n: int, a, c, min_m: int = 1) -> tuple[np.ndarray, np.ndarray]:
    if not min_m <= m <= n:
        raise InvalidInputError(f"dimensions must satisfy {min_m} <= m <= n, got m={m}, n={n}")
    a = np.ones(n) if a is None else np.asarray(a, dtype=float)
    c = np.full(n, 2.0) if c is None else np.asarray(c, dtype=float)
    if a.shape != (n,) or c.shape != (n,):
        raise InvalidInputError(f"a and c must have length n={n}")
    if np.any(a == 0):
        raise InvalidInputError("semiaxes a must be nonzero")
    return a, c


def _sphere_function(a: np.ndarray, c: np.ndarray) -> Callable[[np.ndarray], float]:
    def S(x):
        return float(np.sum(((x - c) / a) ** 2) - 1.0)
    return S


def _is_unit(a: np.ndarray) -> bool:
    return bool(np.all(a == 1.0))


def _is_two_e(c: np.ndarray) -> bool:
    return bool(np.all(c == 2.0))


def _is_first2(c: np.ndarray) -> bool:
    return c[0] == 2.0 and bool(np.all(c[1:] == 0.0))


def _first_unit(n: int) -> np.ndarray:
    e1 = np.zeros(n)
    e1[0] = 1.0
    return e1


def _solved(name: ProblemId, problem: Problem, params: ProblemParams, x_dagger, known_norm=None) -> TestProblem:
    return TestProblem(
        name=name,
        problem=problem,
        params=params,
        known_solution=x_dagger,
        known_norm=known_norm,
    )


def make_ellipsoid_product(m: int, n: int, a=None, c=None) -> TestProblem:
    """F_i = S(x) (x_i^2 + 1) / 2 for i = 1..m; J = S D_{m,n}(x) + y z^T."""
    a, c = _shape_vectors(m, n, a, c)
    S = _sphere_function(a, c)

    def residual(x):
        return 0.5 * S(x) * (x[:m] ** 2 + 1.0)

    def jacobian(x):
        x = np.asarray(x, dtype=float)
        y = x[:m] ** 2 + 1.0
        z = (x - c) / a ** 2
        D = np.zeros((m, n))
        D[np.arange(m), np.arange(m)] = x[:m]
        return S(x) * D + np.outer(y, z)

    x_dagger, known_norm = None, None
    if _is_unit(a) and _is_two_e(c):
        x_dagger = (2.0 - np.sqrt(n) / n) * np.ones(n)
        known_norm = float(2.0 * np.sqrt(n) - 1.0)
    elif _is_unit(a) and _is_first2(c):
        x_dagger, known_norm = _first_unit(n), 1.0

    return _solved(
        ProblemId.ellipsoid_product,
        Problem(m=m, n=n, residual=residual, jacobian=jacobian),
        ProblemParams(m=m, n=n, a=a.tolist(), c=c.tolist()),
        x_dagger,
        known_norm,
    )


def sphere_planes_uses_planes(m: int, n: int) -> bool:
    """True when m < n - sqrt(n) + 1/4, compared exactly in integers."""
    return (4 * (n - m) + 1) ** 2 > 16 * n


def make_sphere_planes(m: int, n: int, a=None, c=None) -> TestProblem:
    """F_i = S(x) (x_i - c_i) for i = 1..m; J = S I_{m x n} + 2 y z^T."""
    a, c = _shape_vectors(m, n, a, c)
    S = _sphere_function(a, c)

    def residual(x):
        return S(x) * (x[:m] - c[:m])

    def jacobian(x):
        x = np.asarray(x, dtype=float)
        y = x[:m] - c[:m]
        z = (x - c) / a ** 2
        return S(x) * np.eye(m, n) + 2.0 * np.outer(y, z)

    x_dagger, known_norm = None, None
    if _is_unit(a) and _is_two_e(c):
        if sphere_planes_uses_planes(m, n):
            x_dagger = np.concatenate([np.full(m, 2.0), np.zeros(n - m)])
            known_norm = float(2.0 * np.sqrt(m))
        else:
            x_dagger = (2.0 - np.sqrt(n) / n) * np.ones(n)
            known_norm = float(2.0 * np.sqrt(n) - 1.0)
    elif _is_unit(a) and _is_first2(c):
        x_dagger, known_norm = _first_unit(n), 1.0

    return _solved(
        ProblemId.sphere_planes,
        Problem(m=m, n=n, residual=residual, jacobian=jacobian),
        ProblemParams(m=m, n=n, a=a.tolist(), c=c.tolist()),
        x_dagger,
        known_norm,
    )


def chain_xi(m: int, n: int) -> float:
    return 2.0 - (n - m + 1) ** -0.5


def make_chain(m: int, n: int, a=None, c=None) -> TestProblem:
    """F_1 = S(x), F_i = x_{i-1} (x_i - c_i) for i = 2..m; bidiagonal Jacobian plus a full first row."""
    a, c = _shape_vectors(m, n, a, c, min_m=2)
    S = _sphere_function(a, c)
    rows = np.arange(1, m)

    def residual(x):
        x = np.asarray(x, dtype=float)
        out = np.empty(m)
        out[0] = S(x)
        out[1:] = x[rows - 1] * (x[rows] - c[rows])
        return out

    def jacobian(x):
        x = np.asarray(x, dtype=float)
        J = np.zeros((m, n))
        J[0] = 2.0 * (x - c) / a ** 2
        J[rows, rows - 1] = x[rows] - c[rows]
        J[rows, rows] = x[rows - 1]
        return J

    x_dagger, known_norm = None, None
    if _is_unit(a) and _is_two_e(c):
        xi = chain_xi(m, n)
        x_dagger = np.concatenate([[xi], np.full(m - 1, 2.0), np.full(n - m, xi)])
        known_norm = float(np.sqrt((n - m + 1) * xi ** 2 + 4.0 * (m - 1)))
    elif _is_unit(a) and _is_first2(c):
        x_dagger, known_norm = _first_unit(n), 1.0

    return _solved(
        ProblemId.chain,
        Problem(m=m, n=n, residual=residual, jacobian=jacobian),
        ProblemParams(m=m, n=n, a=a.tolist(), c=c.tolist()),
        x_dagger,
        known_norm,
    )


def build_problem(problem_id: ProblemId, params: Optional[ProblemParams] = None) -> TestProblem:
    """Look a built-in problem up by identifier and instantiate it from `params`."""
    params = params or ProblemParams()
    problem_id = ProblemId(problem_id)
    if problem_id == ProblemId.robot:
        return make_robot()
    if problem_id == ProblemId.paraboloid:
        return make_paraboloid()
    if problem_id == ProblemId.circle2d:
        return make_circle2d(params.delta, params.gamma)
    if params.m is None or params.n is None:
        raise InvalidInputError(f"problem {problem_id.value} needs m and n")
    factory = SIZED_PROBLEMS[problem_id]
    return factory(params.m, params.n, params.a, params.c)


SIZED_PROBLEMS: Dict[ProblemId, Callable[..., TestProblem]] = {
    ProblemId.ellipsoid_product: make_ellipsoid_product,
    ProblemId.sphere_planes: make_sphere_planes,
    ProblemId.chain: make_chain,
}


def derivative_operator(order: int, n: int) -> np.ndarray:
    """
    Discrete derivative operator with stencil (1, -1) or (1, -2, 1).

    - **Returns:**
        - (n - order) x n matrix
    - **Raises:**
        - InvalidInputError if order is not 1 or 2, or n <= order
    """
    stencils = {1: (1.0, -1.0), 2: (1.0, -2.0, 1.0)}
    if order not in stencils:
        raise InvalidInputError(f"derivative order must be 1 or 2, got {order}")
    if n <= order:
        raise InvalidInputError(f"n must exceed the derivative order ({n} <= {order})")
    D = np.zeros((n - order, n))
    rows = np.arange(n - order)
    for offset, weight in enumerate(stencils[order]):
        D[rows, rows + offset] = weight
    return D


def build_regularizer(spec: RegularizerSpec) -> np.ndarray:
    if spec.kind == RegularizerKind.identity:
        return np.eye(spec.size)
    if spec.kind == RegularizerKind.d1:
        return derivative_operator(1, spec.size)
    if spec.kind == RegularizerKind.d2:
        return derivative_operator(2, spec.size)
    if spec.matrix is None:
        raise InvalidInputError("custom regularizer needs a matrix")
    L = np.asarray(spec.matrix, dtype=float)
    if L.ndim != 2 or L.shape[1] != spec.size:
        raise InvalidInputError(f"custom regularizer must have {spec.size} columns")
    return L


def compact_qr_reduce(L) -> np.ndarray:
    """Replace a tall L (p > n) by the n x n triangular factor of L = QR; ||R x|| = ||L x||."""
    L = np.asarray(L, dtype=float)
    p, n = L.shape
    if p <= n:
        return L
    _, R = sla.qr(L, mode="economic")
    return R


def fd_jacobian(problem: Problem, x, h: Optional[float] = None) -> np.ndarray:
    """
    Central-difference Jacobian of problem.F at x.

    The default step is eps^(1/3) (1 + |x_i|) per coordinate; an explicit `h`
    is used as is for every coordinate.
    """
    if h is not None and not h > 0:
        raise InvalidInputError("finite-difference step must be positive")
    x = np.asarray(x, dtype=float)
    steps = np.cbrt(np.finfo(float).eps) * (1.0 + np.abs(x)) if h is None else np.full(x.size, h)
    J = np.empty((problem.m, problem.n))
    for i in range(problem.n):
        e = np.zeros_like(x)
        e[i] = steps[i]
        J[:, i] = (problem.F(x + e) - problem.F(x - e)) / (2.0 * steps[i])
    return J


def jacobian_at(problem: Problem, x) -> np.ndarray:
    if problem.jacobian is None:
        return fd_jacobian(problem, x)
    return np.asarray(problem.jacobian(x), dtype=float)


def self_check(test_problem: TestProblem, n_points: int = 20, seed: int = config.SEED) -> List[CheckResult]:
    """
    Compare the analytic Jacobian with finite differences at random points
    and verify the known solution, when one is recorded.
    """
    rng = np.random.default_rng(seed)
    problem = test_problem.problem
    results: List[CheckResult] = []

    if problem.jacobian is not None:
        worst = 0.0
        for _ in range(n_points):
            x = rng.uniform(config.X0_LOW, config.X0_HIGH, problem.n)
            J = jacobian_at(problem, x)
            J_fd = fd_jacobian(problem, x)
            worst = max(worst, np.linalg.norm(J - J_fd) / max(1.0, np.linalg.norm(J)))
        results.append(CheckResult(
            name="jacobian-vs-fd", passed=worst <= FD_TOL, value=worst, tolerance=FD_TOL,
            detail=f"{n_points} random points",
        ))

    if test_problem.known_solution is not None:
        x_dagger = test_problem.known_solution
        res = float(np.linalg.norm(problem.r(x_dagger)))
        results.append(CheckResult(
            name="known-solution-residual", passed=res <= SOLUTION_TOL, value=res, tolerance=SOLUTION_TOL,
        ))
        if test_problem.known_norm is not None:
            gap = abs(float(np.linalg.norm(x_dagger)) - test_problem.known_norm)
            results.append(CheckResult(
                name="known-norm", passed=gap <= NORM_TOL, value=gap, tolerance=NORM_TOL,
            ))

    for check in results:
        if not check.passed:
            logger.warning("%s check %s failed: %.3g > %.3g",
                           test_problem.name.value, check.name, check.value, check.tolerance)
    return results
