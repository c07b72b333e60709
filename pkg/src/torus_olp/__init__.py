"""Orthogonal Laurent polynomials on the unit torus via block Gauss-Borel factorization."""

import importlib

__version__ = "0.1.0"

_SUBMODULES = ("longilex", "laurent", "measure", "moments", "gaussborel", "opbasis", "spectral", "darboux", "toda", "cli")


def __getattr__(name):
    # submodules load on first access so the CLI can set thread limits before numpy starts
    if name in _SUBMODULES:
        return importlib.import_module(f"{__name__}.{name}")
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
