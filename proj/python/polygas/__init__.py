"""Exact polymer-gas computations: partition functions, convergence criteria,
Kirkwood-Salzburg iteration and the report commands of the CLI."""

from fractions import Fraction
from os import PathLike

from . import _core
from ._core import (
    DivergenceIndicator,
    InvalidArgument,
    NormalizationFailure,
    ParseError,
    PrecheckFailure,
    ResourceLimit,
    command_names,
    generate,
)

__all__ = [
    "DivergenceIndicator",
    "InvalidArgument",
    "NormalizationFailure",
    "ParseError",
    "PrecheckFailure",
    "ResourceLimit",
    "check_criterion",
    "command_names",
    "compute",
    "generate",
    "optimize_radius",
    "partition_function",
    "run",
    "ursell_coefficient",
]


def _text(x):
    if isinstance(x, float):
        return repr(x)
    return str(Fraction(x)) if isinstance(x, (int, Fraction)) else str(x)


def _value(s):
    try:
        return Fraction(s)
    except ValueError:
        return float(s)


def compute(command, model=None, *, toml=None, **options):
    """Report of one command as a dict with ``status`` and ``tables``.

    Pass a model file path, or the model itself as TOML text via ``toml``.
    """
    if (model is None) == (toml is None):
        raise ValueError("pass exactly one of model or toml")
    if toml is not None:
        return _core.compute_text(command, toml, **options)
    return _core.compute_file(command, str(model), **options)


def run(command, model, out, **options):
    """Writes the command's CSV/JSON reports under ``out``; returns the exit status."""
    return _core.run(command, str(model), out if isinstance(out, PathLike) else str(out), **options)


def partition_function(n, edges, z, mode="exact"):
    """Xi(z) over polymers 0..n-1 with the given incompatible pairs."""
    out = _core.partition_function(n, list(edges), [_text(v) for v in z], mode)
    return float(out) if mode == "float" else Fraction(out)


def ursell_coefficient(n, edges, tuple_):
    return Fraction(_core.ursell_coefficient(n, list(edges), list(tuple_)))


def check_criterion(n, edges, rho, mu, kind, mode="exact"):
    out = _core.check_criterion(n, list(edges), [_text(v) for v in rho], [_text(v) for v in mu], kind, mode)
    out["margins"] = {k: _value(v) for k, v in out["margins"].items()}
    return out


def optimize_radius(n, edges, kind):
    return _core.optimize_radius(n, list(edges), kind)
