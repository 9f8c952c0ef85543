from pydantic import BaseModel, field_validator
from mngn import config


class RankParams(BaseModel):
    gap_ratio: float = config.RANK_GAP_RATIO
    value_floor: float = config.RANK_VALUE_FLOOR

    @field_validator("gap_ratio")
    @classmethod
    def ratio_above_one(cls, v):
        if v <= 1:
            raise ValueError("gap_ratio must be greater than 1")
        return v

    @field_validator("value_floor")
    @classmethod
    def floor_positive(cls, v):
        if v <= 0:
            raise ValueError("value_floor must be positive")
        return v
