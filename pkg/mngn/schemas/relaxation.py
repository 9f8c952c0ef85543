import math
from enum import Enum
from typing import List
from pydantic import BaseModel, Field, field_validator
from mngn import config


class DeltaMode(str, Enum):
    fixed = "fixed-multiplicative"
    adaptive = "adaptive-power"


class LogBase(str, Enum):
    natural = "natural"
    base10 = "base-10"


class EtaState(BaseModel):
    eta: float = config.ETA_INIT
    residual_history: List[float] = Field(default_factory=list)
    k_res: int = config.K_RES
    slope_min: float = config.SLOPE_MIN
    slope_max: float = config.SLOPE_MAX
    log_base: LogBase = LogBase(config.LOG_BASE)
    # Slope of the last regression, None until k_res residuals are known.
    slope: float | None = None

    @field_validator("eta")
    @classmethod
    def eta_positive(cls, v):
        if not (v > 0 and math.isfinite(v)):
            raise ValueError("eta must be positive and finite")
        return v

    @field_validator("k_res")
    @classmethod
    def k_res_at_least_two(cls, v):
        if v < 2:
            raise ValueError("k_res must be at least 2 to fit a line")
        return v


class BetaState(BaseModel):
    beta: float = 1.0

    @field_validator("beta")
    @classmethod
    def beta_in_range(cls, v):
        if not (config.BETA_FLOOR < v <= 1.0):
            raise ValueError("beta must lie in (1e-8, 1]")
        return v
