"""Invariant-measure condition for goodwill with a single point delay.

The uncontrolled lifted process with point-delay forgetting has a unique
non-degenerate invariant measure when

    a0 < 1   and   a0 < -a1 < sqrt(g^2 + a0^2),

where ``g`` is the root in (0, pi) of ``g cot g = a0``.  The transcendental
equation is sometimes printed with ``coth``; that reading has no root for
``a0 <= 1`` and is available only as ``variant="coth"`` so the difference can
be inspected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ScenarioError

ROOT_TOL = 1e-12


class NoRootError(ScenarioError):
    pass


def _g_cot(g: float) -> float:
    return 1.0 if g == 0.0 else g / math.tan(g)


def _g_coth(g: float) -> float:
    return 1.0 if g == 0.0 else g / math.tanh(g)


def _bisect(f, lo: float, hi: float, tol: float) -> float:
    """Root of ``f`` on ``[lo, hi]`` given ``f(lo) > 0 > f(hi)``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gamma_root(a0: float, variant: str = "cot", tol: float = ROOT_TOL) -> float:
    """Root in (0, pi) of ``g cot g = a0`` (or ``g coth g = a0``).

    ``g cot g`` falls from 1 to -inf on (0, pi), so a root exists exactly
    when ``a0 < 1``.  ``g coth g`` rises from 1 to ``pi coth pi``.
    """
    if variant == "cot":
        if not a0 < 1.0:
            raise NoRootError(f"g cot g = {a0!r} has no root in (0, pi): need a0 < 1")
        return _bisect(lambda g: _g_cot(g) - a0, 0.0, math.pi, tol)
    if variant == "coth":
        top = _g_coth(math.pi)
        if not 1.0 < a0 < top:
            raise NoRootError(
                f"g coth g = {a0!r} has no root in (0, pi): g coth g ranges over (1, {top:.6f})"
            )
        return _bisect(lambda g: a0 - _g_coth(g), 0.0, math.pi, tol)
    raise ValueError(f"unknown variant {variant!r}; use 'cot' or 'coth'")


@dataclass(frozen=True)
class StabilityVerdict:
    a0: float
    a1: float
    gamma_root: float
    bound: float
    holds: bool
    variant: str = "cot"
    note: str = ""


def invariant_measure_condition(a0: float, a1: float, variant: str = "cot") -> StabilityVerdict:
    if not a0 < 1.0 and variant == "cot":
        return StabilityVerdict(a0, a1, math.nan, math.nan, False, variant, "a0 < 1 fails")
    try:
        g = gamma_root(a0, variant)
    except NoRootError as exc:
        return StabilityVerdict(a0, a1, math.nan, math.nan, False, variant, str(exc))
    bound = math.hypot(g, a0)
    holds = a0 < 1.0 and a0 < -a1 < bound
    if holds:
        note = ""
    elif not a0 < -a1:
        note = "a0 < -a1 fails"
    elif not -a1 < bound:
        note = "-a1 < sqrt(g^2 + a0^2) fails"
    else:
        note = "a0 < 1 fails"
    return StabilityVerdict(a0, a1, g, bound, holds, variant, note)
