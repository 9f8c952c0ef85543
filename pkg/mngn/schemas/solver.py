from enum import Enum
from typing import Callable, List, Optional
import numpy as np
from pydantic import BaseModel, Field, field_serializer, field_validator, model_validator
from mngn import config
from mngn.schemas.rank import RankParams
from mngn.schemas.relaxation import DeltaMode, LogBase


class Method(str, Enum):
    mngn = "mngn"
    mngn2_a = "mngn2-a"
    mngn2_ab = "mngn2-ab"
    mngn2_abd = "mngn2-abd"
    ckb1 = "ckb1"
    ckb2 = "ckb2"
    rckb1 = "rckb1"
    rckb2 = "rckb2"

    @property
    def estimates_rank(self) -> bool:
        return self not in (Method.mngn, Method.ckb1, Method.ckb2)

    @property
    def ckb_variant(self) -> Optional[int]:
        return {
            Method.ckb1: 1, Method.rckb1: 1,
            Method.ckb2: 2, Method.rckb2: 2,
        }.get(self)

    @property
    def uses_beta_loop(self) -> bool:
        return self in (Method.mngn2_ab, Method.mngn2_abd)


class FailureReason(str, Enum):
    max_iter = "max-iter"
    line_search_exhausted = "line-search-exhausted"
    factorization_error = "factorization-error"
    diverged = "diverged"


class Problem(BaseModel):
    """
    Nonlinear least-squares problem min ||F(x) - b||.

    `jacobian` may be None, in which case the solver falls back to central
    finite differences.
    """
    m: int
    n: int
    residual: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    b: Optional[np.ndarray] = None

    class Config:
        arbitrary_types_allowed = True

    @model_validator(mode="after")
    def check_dimensions(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("dimensions must be positive")
        if self.b is None:
            self.b = np.zeros(self.m)
        elif np.shape(self.b) != (self.m,):
            raise ValueError(f"b must have shape ({self.m},)")
        return self

    def F(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.residual(x), dtype=float)

    def r(self, x: np.ndarray) -> np.ndarray:
        return self.F(x) - self.b


class SolveOptions(BaseModel):
    method: Method = Method.mngn2_abd
    stop_tol: float = config.STOP_TOL
    max_iter: int = config.MAX_ITER
    rank_params: RankParams = Field(default_factory=RankParams)
    model_profile: Optional[np.ndarray] = None
    regularizer: Optional[np.ndarray] = None
    fixed_eta: Optional[float] = None
    delta_mode: Optional[DeltaMode] = None
    log_base: LogBase = LogBase(config.LOG_BASE)
    keep_iterates: bool = False

    class Config:
        arbitrary_types_allowed = True

    @field_validator("stop_tol")
    @classmethod
    def tol_positive(cls, v):
        if v <= 0:
            raise ValueError("stop_tol must be positive")
        return v

    @field_validator("max_iter")
    @classmethod
    def max_iter_positive(cls, v):
        if v < 1:
            raise ValueError("max_iter must be at least 1")
        return v

    @field_validator("regularizer")
    @classmethod
    def regularizer_is_matrix(cls, v):
        if v is not None and np.ndim(v) != 2:
            raise ValueError("regularizer must be a 2-D matrix")
        return v

    @model_validator(mode="after")
    def check_delta_mode(self):
        if self.method == Method.mngn2_ab:
            if self.fixed_eta is None or self.fixed_eta <= 0:
                raise ValueError("mngn2-ab requires a positive fixed_eta")
            expected = DeltaMode.fixed
        elif self.method == Method.mngn2_abd:
            expected = DeltaMode.adaptive
        else:
            expected = None
        if self.delta_mode is None:
            self.delta_mode = expected
        elif self.delta_mode != expected:
            raise ValueError(
                f"delta_mode {self.delta_mode.value} does not apply to {self.method.value}")
        return self


class IterationRecord(BaseModel):
    k: int
    alpha: float
    beta: float
    eta: Optional[float] = None
    rank: int
    residual_norm: float
    solution_norm: float
    step_norm: float
    iterate: Optional[List[float]] = None


class SolveResult(BaseModel):
    x_final: np.ndarray
    converged: bool
    iterations: int
    trace: List[IterationRecord] = Field(default_factory=list)
    failure_reason: Optional[FailureReason] = None

    class Config:
        arbitrary_types_allowed = True

    @field_serializer("x_final")
    def _x_as_list(self, value):
        return value.tolist()

    @property
    def final_record(self) -> Optional[IterationRecord]:
        return self.trace[-1] if self.trace else None
