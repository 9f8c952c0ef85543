import logging
import numpy as np
from mngn.exceptions import InvalidInputError
from mngn.schemas.rank import RankParams

logger = logging.getLogger(__name__)


def estimate_rank_svd(sigma, params: RankParams | None = None) -> int:
    """
    Numerical rank from the largest gap in a nonincreasing spectrum.

    Looks at the ratios sigma_i / sigma_{i+1}. Among the indices where the
    ratio exceeds `gap_ratio` and sigma_i exceeds `value_floor`, the one with
    the largest ratio is the rank (smallest index on ties). With no such
    index the spectrum is treated as full.

    - **Raises:**
        - InvalidInputError if sigma is empty or not finite
    """
    params = params or RankParams()
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 1 or sigma.size == 0:
        raise InvalidInputError("sigma must be a non-empty vector")
    if not np.all(np.isfinite(sigma)):
        raise InvalidInputError("sigma contains non-finite entries")

    q = sigma.size
    if q == 1:
        return 1
    head, tail = sigma[:-1], sigma[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(tail > 0, head / np.where(tail > 0, tail, 1.0), np.inf)
    candidates = (ratios > params.gap_ratio) & (head > params.value_floor)
    if not candidates.any():
        return q
    masked = np.where(candidates, ratios, -np.inf)
    # argmax returns the first maximal index
    rank = int(np.argmax(masked)) + 1
    logger.debug("rank %d of %d (gap ratio %.3g)", rank, q, masked[rank - 1])
    return rank


def estimate_rank_gsvd(c, d: int = 0, params: RankParams | None = None) -> int:
    """
    Rank of J from the nondecreasing c-values of a GSVD, plus the d-column identity block.

    The gap is searched between small leading c's and large trailing ones,
    i.e. the SVD rule applied to the reversed sequence.
    """
    params = params or RankParams()
    c = np.asarray(c, dtype=float)
    if d < 0:
        raise InvalidInputError("d must be nonnegative")
    if c.size == 0:
        if d == 0:
            raise InvalidInputError("empty c-values with no identity block")
        return d
    return estimate_rank_svd(c[::-1], params) + d
