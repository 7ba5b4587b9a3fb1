"""Stochastic precedence between independent variables given by quantile functions.

For independent ``X1 = x1(U1)`` and ``X2 = x2(U2)`` the preference
``rho(X1, X2) = E sign(X1 - X2)`` equals the double integral of
``sign(x1(u1) - x2(u2))`` over the unit square, which for step functions is a
finite sum over pairs of intervals.  ``X`` precedes ``Y`` when
``rho(Y, X) > 0``.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import NamedTuple, Sequence, Union

import numpy as np

from .quantile import FloatQuantile, StepQuantile, format_rational, to_rational

AnyQuantile = Union[StepQuantile, FloatQuantile]

HALF = Fraction(1, 2)


class WinProbabilities(NamedTuple):
    """``P(X1 < X2)``, ``P(X1 = X2)``, ``P(X1 > X2)`` for independent variables."""

    less: Fraction
    tie: Fraction
    greater: Fraction


def win_probabilities(x1: AnyQuantile, x2: AnyQuantile) -> WinProbabilities:
    # Values of a quantile function are sorted, so for each piece of x1 the
    # mass of x2 below / equal / above it comes from two bisections.
    vals2 = x2.values
    widths2 = [w for w, _ in x2.pieces()]
    zero = widths2[0] * 0
    cum = [zero, *accumulate(widths2)]
    total2 = cum[-1]
    less = tie = greater = zero * 0
    for w, a in x1.pieces():
        lo = bisect_left(vals2, a)
        hi = bisect_right(vals2, a)
        greater += w * cum[lo]
        tie += w * (cum[hi] - cum[lo])
        less += w * (total2 - cum[hi])
    return WinProbabilities(less, tie, greater)


def rho_q(x1: AnyQuantile, x2: AnyQuantile):
    """Exact ``E sign(x1(U1) - x2(U2))``; lies in [-1, 1]."""
    p = win_probabilities(x1, x2)
    return p.greater - p.less


def precedes(x: AnyQuantile, y: AnyQuantile) -> bool:
    """True when ``y`` beats ``x`` more often than the reverse."""
    return rho_q(y, x) > 0


@dataclass
class CycleReport:
    """Edge probabilities ``P(X_i < X_{i+1})`` around a closed cycle."""

    pairwise_probabilities: list
    tie_probabilities: list
    min_probability: object
    is_intransitive: bool
    failing_edges: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def fmt(v):
            return format_rational(v) if isinstance(v, Fraction) else v

        return {
            "pairwise_probabilities": [fmt(p) for p in self.pairwise_probabilities],
            "tie_probabilities": [fmt(p) for p in self.tie_probabilities],
            "min_probability": fmt(self.min_probability),
            "is_intransitive": self.is_intransitive,
            "failing_edges": [list(e) for e in self.failing_edges],
        }


def cycle_report(functions: Sequence[AnyQuantile]) -> CycleReport:
    """Check ``X_1 < X_2 < ... < X_m < X_1`` in the given traversal order.

    Without ties the tuple is intransitive iff every edge probability exceeds
    1/2.  With ties, each edge must instead have ``rho(X_{i+1}, X_i) > 0``.
    Failing edges are reported as 1-based ``(i, i+1)`` pairs.
    """
    m = len(functions)
    if m < 3:
        raise ValueError(f"a cycle needs at least 3 members, got {m}")
    probs, ties, failing = [], [], []
    for i in range(m):
        a, b = functions[i], functions[(i + 1) % m]
        p = win_probabilities(a, b)
        probs.append(p.less)
        ties.append(p.tie)
        ok = p.less > p.greater if p.tie else p.less > HALF
        if not ok:
            failing.append((i + 1, (i + 1) % m + 1))
    return CycleReport(probs, ties, min(probs), not failing, failing)


def trybula_bound(m: int) -> float:
    """Largest attainable ``min_i P(X_i < X_{i+1})`` over independent m-cycles."""
    if m < 3:
        raise ValueError(f"m must be at least 3, got {m}")
    return 1.0 - 1.0 / (4.0 * math.cos(math.pi / (m + 2)) ** 2)


GOLDEN_P = (math.sqrt(5.0) - 1.0) / 2.0


def trybula_triplet(p) -> tuple:
    """The three-variable extremal example: X in {1, 4}, Y = 2, Z in {0, 3}.

    ``P(X = 1) = p`` and ``P(Z = 3) = p``.  A Fraction (or int/str) ``p``
    yields exact StepQuantiles; a float yields FloatQuantiles.
    """
    if isinstance(p, float):
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {p}")
        return (
            FloatQuantile((0.0, p, 1.0), (1.0, 4.0)),
            FloatQuantile((0.0, 1.0), (2.0,)),
            FloatQuantile((0.0, 1.0 - p, 1.0), (0.0, 3.0)),
        )
    p = to_rational(p)
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    return (
        StepQuantile((0, p, 1), (1, 4)),
        StepQuantile((0, 1), (2,)),
        StepQuantile((0, 1 - p, 1), (0, 3)),
    )


class MonteCarloEstimate(NamedTuple):
    estimate: float
    standard_error: float


def _sign_table(x1: AnyQuantile, x2: AnyQuantile) -> np.ndarray:
    # exact signs for StepQuantile inputs; no float comparison of values
    return np.array(
        [[(a > b) - (a < b) for b in x2.values] for a in x1.values], dtype=np.int8
    )


def _piece_index(q: AnyQuantile, u: np.ndarray) -> np.ndarray:
    inner = np.array([float(b) for b in q.breakpoints[1:-1]], dtype=np.float64)
    return np.searchsorted(inner, u, side="right")


def monte_carlo_rho(
    x1: AnyQuantile, x2: AnyQuantile, trials: int, seed: int
) -> MonteCarloEstimate:
    """Sample ``sign(x1(U1) - x2(U2))`` with independent uniforms.

    Uses numpy's PCG64 bit generator.  Each call draws ``trials`` values of U1
    and then ``trials`` values of U2 from a fresh stream seeded by ``seed``,
    so results are reproducible bit for bit.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    u1 = rng.random(trials)
    u2 = rng.random(trials)
    table = _sign_table(x1, x2)
    signs = table[_piece_index(x1, u1), _piece_index(x2, u2)].astype(np.float64)
    est = float(signs.mean())
    sd = float(signs.std(ddof=1)) if trials > 1 else 0.0
    return MonteCarloEstimate(est, sd / math.sqrt(trials))
