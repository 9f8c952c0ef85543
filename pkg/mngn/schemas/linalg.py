from enum import Enum
from typing import Optional
import numpy as np
from pydantic import BaseModel, field_serializer


class SvdFactors(BaseModel):
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    class Config:
        arbitrary_types_allowed = True

    @property
    def shape(self) -> tuple[int, int]:
        return self.U.shape[0], self.V.shape[0]

    def reconstruct(self) -> np.ndarray:
        m, n = self.shape
        sigma_full = np.zeros((m, n))
        q = self.sigma.size
        sigma_full[:q, :q] = np.diag(self.sigma)
        return self.U @ sigma_full @ self.V.T


class GsvdLayout(BaseModel):
    m: int
    n: int
    p: int
    d: int

    @property
    def q(self) -> int:
        return min(self.m, self.n)

    @property
    def row_offset(self) -> int:
        # Columns of Sigma_J left of this index are structurally zero when m < n.
        return max(0, self.n - self.m)


class GsvdFactors(BaseModel):
    """
    Generalized SVD of a pair (J, L): J = U Sigma_J Winv, L = V Sigma_L Winv.

    `c` and `s` are the full diagonals of length n sorted with c ascending:
    leading zeros of c span N(J), trailing ones form the identity block of
    size d = n - p that pairs with N(L).
    """
    U: np.ndarray
    V: np.ndarray
    Winv: np.ndarray
    c: np.ndarray
    s: np.ndarray
    layout: GsvdLayout

    class Config:
        arbitrary_types_allowed = True

    @property
    def generalized_singular_values(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(self.s > 0, self.c / np.where(self.s > 0, self.s, 1.0), np.inf)

    def rank_candidates(self) -> np.ndarray:
        """c-values the rank estimator looks at: length q - d, identity block excluded."""
        lay = self.layout
        return self.c[lay.n - lay.q: lay.n - lay.d]

    def cs_block(self, rank: int) -> tuple[np.ndarray, np.ndarray]:
        lay = self.layout
        lo, hi = lay.n - rank, lay.n - lay.d
        return self.c[lo:hi], self.s[lo:hi]

    def sigma_j(self) -> np.ndarray:
        lay = self.layout
        out = np.zeros((lay.m, lay.n))
        cols = np.arange(lay.row_offset, lay.n)
        out[cols - lay.row_offset, cols] = self.c[cols]
        return out

    def sigma_l(self) -> np.ndarray:
        lay = self.layout
        out = np.zeros((lay.p, lay.n))
        idx = np.arange(lay.p)
        out[idx, idx] = self.s[:lay.p]
        return out


class BasisKind(str, Enum):
    orthonormal = "orthonormal"
    oblique = "oblique"


class NullSpaceBasis(BaseModel):
    columns: np.ndarray
    kind: BasisKind
    # Rows of Winv paired with `columns` (oblique kind only).
    rows: Optional[np.ndarray] = None

    class Config:
        arbitrary_types_allowed = True

    @property
    def dim(self) -> int:
        return self.columns.shape[1]

    @field_serializer("columns", "rows")
    def _as_list(self, value):
        return None if value is None else value.tolist()
