from pathlib import Path
from typing import List, Optional
import numpy as np
from jinja2 import Environment, FileSystemLoader
from mngn.exceptions import UsageError

TEMPLATES_DIR = Path(__file__).parent / "templates"


def parse_vector(text: Optional[str], n: int) -> Optional[List[float]]:
    """
    Expand a vector shorthand to a list of length n.

    Accepted forms: `zero`, `ones`, `two-e` (2e), `first2` ((2, 0, ..., 0)),
    `<scalar>e` such as `1.7e`, or an explicit comma separated list.
    """
    if text is None:
        return None
    text = text.strip()
    if text == "zero":
        return [0.0] * n
    if text == "ones":
        return [1.0] * n
    if text == "two-e":
        return [2.0] * n
    if text == "first2":
        return [2.0] + [0.0] * (n - 1)
    if text.endswith("e") and "," not in text:
        try:
            return [float(text[:-1])] * n
        except ValueError:
            raise UsageError(f"invalid vector shorthand '{text}'")
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"invalid vector '{text}': expected zero, ones, two-e, first2, <scalar>e or a list")
    if len(values) != n:
        raise UsageError(f"vector '{text}' has {len(values)} entries, expected {n}")
    return values


def trial_rng(seed: int, trial: int, stream_key: Optional[int] = None) -> np.random.Generator:
    """Independent generator for one trial, keyed by (seed, trial[, stream_key])."""
    entropy = [seed, trial] if stream_key is None else [seed, trial, stream_key]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def render_template(name: str, **context) -> str:
    env = Environment(loader=FileSystemLoader(TEMPLATES_DIR), trim_blocks=True, lstrip_blocks=True)
    template = env.get_template(name)
    return template.render(**context)
