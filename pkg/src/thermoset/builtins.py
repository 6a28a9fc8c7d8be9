"""Built-in example systems, keyed by registry name.

``cantor-thirds`` and ``golden-mean-thirds`` are affine middle-thirds
systems (the latter with the word 11 forbidden), ``nonlinear-perturbed``
adds a quadratic bend to both contractions, ``paper-example`` is the
two-branch parabolic system with an indifferent fixed point at 0 whose
contracting branch is exponentially flat there, and ``parabolic-quadratic``
/ ``parabolic-cubic`` are power-law model systems with local behaviour
x + x^2 and x + x^3 at the origin.
"""

from __future__ import annotations

import copy

from . import expr as ex
from .maps import _invert_monotone, make_system

_FLAT_SRC = "x + x^2 * exp(-1/x)"
_QUAD_SRC = "x + x^2"
_CUBIC_SRC = "x + x^3"


def _right_endpoint(source, lo_guess, hi_guess):
    """Solve forward(c) = 1 so the expanding branch maps [0, c] onto [0, 1]."""
    ast = ex.parse_expr(source)
    fn = ex.compile_expr(ast)
    dfn = ex.compile_expr(ex.differentiate(ast))
    return _invert_monotone(fn, dfn, lo_guess, hi_guess, 1.0, 1e-16)


def _registry():
    third = 1.0 / 3.0
    flat_end = _right_endpoint(_FLAT_SRC, 0.5, 0.95)
    quad_end = _right_endpoint(_QUAD_SRC, 0.3, 0.9)
    cubic_end = _right_endpoint(_CUBIC_SRC, 0.3, 0.9)
    return {
        "cantor-thirds": {
            "interval": [0.0, 1.0],
            "branches": [
                {"kind": "affine", "a": third, "b": 0.0, "interval": [0.0, third]},
                {"kind": "affine", "a": third, "b": 2.0 / 3.0, "interval": [2.0 / 3.0, 1.0]},
            ],
            "forbidden": [],
        },
        "golden-mean-thirds": {
            "interval": [0.0, 1.0],
            "branches": [
                {"kind": "affine", "a": third, "b": 0.0, "interval": [0.0, third]},
                {"kind": "affine", "a": third, "b": 2.0 / 3.0, "interval": [2.0 / 3.0, 1.0]},
            ],
            "forbidden": [[1, 1]],
        },
        "nonlinear-perturbed": {
            "interval": [0.0, 1.0],
            "branches": [
                {"kind": "expr", "contraction": "x/3 + x^2/100",
                 "interval": [0.0, 0.35]},
                {"kind": "expr", "contraction": "x/3 + x^2/100 + 13/20",
                 "interval": [0.65, 1.0]},
            ],
            "forbidden": [],
        },
        "paper-example": {
            "interval": [0.0, 1.0],
            "branches": [
                {"kind": "expr", "forward": _FLAT_SRC,
                 "interval": [0.0, flat_end],
                 "limits": {"0": 0.0},
                 "derivative_limits": {"0": 1.0}},
                {"kind": "affine", "a": 0.1, "b": 0.9, "interval": [0.9, 1.0]},
            ],
            "forbidden": [],
        },
        "parabolic-quadratic": {
            "interval": [0.0, 1.0],
            "branches": [
                {"kind": "expr", "forward": _QUAD_SRC, "interval": [0.0, quad_end]},
                {"kind": "affine", "a": 0.3, "b": 0.7, "interval": [0.7, 1.0]},
            ],
            "forbidden": [],
        },
        "parabolic-cubic": {
            "interval": [0.0, 1.0],
            "branches": [
                {"kind": "expr", "forward": _CUBIC_SRC, "interval": [0.0, cubic_end]},
                {"kind": "affine", "a": 0.25, "b": 0.75, "interval": [0.75, 1.0]},
            ],
            "forbidden": [],
        },
    }


_CONFIGS = None
_SYSTEMS = {}


def builtin_names():
    global _CONFIGS
    if _CONFIGS is None:
        _CONFIGS = _registry()
    return sorted(_CONFIGS)


def builtin_config(name):
    """Fresh configuration dict for a registered system name."""
    global _CONFIGS
    if _CONFIGS is None:
        _CONFIGS = _registry()
    if name not in _CONFIGS:
        raise KeyError(f"unknown builtin system {name!r} (have: {', '.join(sorted(_CONFIGS))})")
    return copy.deepcopy(_CONFIGS[name])


def builtin_system(name):
    """Validated system for a registry name, memoized per process."""
    if name not in _SYSTEMS:
        _SYSTEMS[name] = make_system(builtin_config(name))
    return _SYSTEMS[name]
