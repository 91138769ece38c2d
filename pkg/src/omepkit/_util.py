"""Shared formatting helpers used by cli.py and verification.py."""

from __future__ import annotations

from collections.abc import Mapping
from fractions import Fraction

from .linalg import RatMatrix, Spectrum, as_multiple, kn


def _fmt_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fmt_matrix(m: RatMatrix, indent: str = "") -> str:
    if m.rows == 0 or m.cols == 0:
        return f"{indent}[] ({m.rows}x{m.cols})"
    cells = [[_fmt_rational(x) for x in row] for row in m.tolist()]
    width = max(len(c) for row in cells for c in row)
    return "\n".join(indent + "[ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells)


def _fmt_inline(m: RatMatrix) -> str:
    return "[" + "; ".join(" ".join(_fmt_rational(x) for x in row) for row in m.tolist()) + "]"


def _describe_matrix(m: RatMatrix) -> str | None:
    """Short name such as '3·K_3' or '0' when the matrix has one."""
    if m.is_zero():
        return "0"
    if m.is_square:
        c = as_multiple(m, kn(m.rows))
        if c is not None:
            return f"K_{m.rows}" if c == 1 else f"{_fmt_rational(c)}·K_{m.rows}"
    return None


def _fmt_spectrum(spec: Spectrum | Mapping[Fraction, int]) -> str:
    exact = spec.exact if isinstance(spec, Spectrum) else spec
    parts = [f"{_fmt_rational(v)}^{m}" for v, m in exact.items()]
    if isinstance(spec, Spectrum):
        parts += [f"≈{x:.4f}" for x in spec.approximate]
    return " ".join(parts) if parts else "(empty)"
