"""radsum: exact and rigorously-bounded verification of Rademacher-sum
inequalities.

The package enumerates weighted sign sums exactly, checks segment and
tail inequalities with quadratic-surd arithmetic, evaluates a rigorous
characteristic-function tail bound with certified integration error, and
verifies a catalog of polynomial positivity certificates.  See README.md
for the CLI.
"""

from __future__ import annotations

from . import errors
from ._surd import (
    Fraction,
    RootValue,
    SurdValue,
    exact_cmp,
    frac,
    root_max,
    root_min,
    surd_sign,
)

__version__ = "0.1.0"

_LAZY = {
    "core": ".core",
    "flips": ".flips",
    "compare": ".compare",
    "elimination": ".elimination",
    "numerics": ".numerics",
    "prawitz": ".prawitz",
    "certificates": ".certificates",
    "gridcert": ".gridcert",
    "cases": ".cases",
    "cli": ".cli",
}

_LAZY_NAMES = {
    "WeightVector": ".core",
    "ExactDist": ".core",
    "Segment": ".core",
    "exact_distribution": ".core",
    "segment_prob": ".core",
    "check_tomaszewski": ".core",
    "check_scale_duality": ".core",
    "cheby_refined": ".core",
    "parse_weights": ".core",
    "eliminate": ".elimination",
    "eliminate3_LR": ".elimination",
    "semi_inductive_witness": ".elimination",
    "check_RR": ".elimination",
    "check_T5_bounds": ".elimination",
}

__all__ = [
    "Fraction",
    "RootValue",
    "SurdValue",
    "errors",
    "exact_cmp",
    "frac",
    "root_max",
    "root_min",
    "surd_sign",
    *sorted(_LAZY),
    *sorted(_LAZY_NAMES),
]


def __getattr__(name: str):
    import importlib

    if name in _LAZY:
        module = importlib.import_module(_LAZY[name], __name__)
        globals()[name] = module
        return module
    if name in _LAZY_NAMES:
        module = importlib.import_module(_LAZY_NAMES[name], __name__)
        value = getattr(module, name)
        globals()[name] = value
        return value
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
