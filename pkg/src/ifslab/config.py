"""Budget caps and tolerances.

Defaults can be overridden per call or, for the pair budget, globally
through the ``IFSLAB_BUDGET`` environment variable.
"""

import os
from dataclasses import dataclass, replace

ORTHO_TOL = 1e-12
WEIGHT_TOL = 1e-12


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    return int(float(raw))


@dataclass(frozen=True)
class Budget:
    max_pairs: int = 10**8          # word pairs N^n (N^n - 1) / 2 per level
    max_points: int = 10**7         # attractor point clouds
    max_cells: int = 10**7          # histogram cells / cylinders
    max_atoms: int = 2000           # optimal transport supports
    exhaustive_words: int = 256     # below this, pairs are enumerated directly
    cdf_nodes: int = 2 * 10**6      # exact CDF solver state cap

    def with_overrides(self, **kwargs):
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def default_budget():
    return Budget(max_pairs=_env_int("IFSLAB_BUDGET", Budget.max_pairs))
