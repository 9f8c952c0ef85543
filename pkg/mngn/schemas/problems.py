from enum import Enum
from typing import List, Optional
import numpy as np
from pydantic import BaseModel, field_validator
from mngn.schemas.solver import Problem


class ProblemId(str, Enum):
    robot = "robot"
    paraboloid = "paraboloid"
    circle2d = "circle2d"
    ellipsoid_product = "ellipsoid-product"
    sphere_planes = "sphere-planes"
    chain = "chain"


class ProblemParams(BaseModel):
    """Parameters of the built-in problems; each factory reads the ones it needs."""
    m: Optional[int] = None
    n: Optional[int] = None
    a: Optional[List[float]] = None
    c: Optional[List[float]] = None
    delta: float = 0.75
    gamma: float = 2.0


class RegularizerKind(str, Enum):
    identity = "identity"
    d1 = "d1"
    d2 = "d2"
    custom = "custom"


class RegularizerSpec(BaseModel):
    kind: RegularizerKind
    size: int
    matrix: Optional[List[List[float]]] = None

    @field_validator("size")
    @classmethod
    def size_positive(cls, v):
        if v < 1:
            raise ValueError("size must be positive")
        return v


class TestProblem(BaseModel):
    __test__ = False

    name: ProblemId
    problem: Problem
    params: ProblemParams
    known_solution: Optional[np.ndarray] = None
    known_norm: Optional[float] = None

    class Config:
        arbitrary_types_allowed = True


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: Optional[str] = None
