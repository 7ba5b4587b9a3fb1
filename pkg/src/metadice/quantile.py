"""Exact step quantile functions.

A quantile function here is a nondecreasing, right-continuous step function
on (0, 1).  It is described by breakpoints ``0 = u_0 < u_1 < ... < u_n = 1``
and values ``c_1 <= ... <= c_n``, the value ``c_j`` being held on
``[u_{j-1}, u_j)``.  All arithmetic is done with :class:`fractions.Fraction`
so that signs of differences, and everything built on them, are exact.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

Rational = Fraction
RationalLike = Union[int, str, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to a Fraction; strings may be ``"7"`` or ``"9/2"``."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, float):
        raise TypeError(f"refusing to convert float {value!r} to an exact rational")
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


class _StepFunction:
    """Shared machinery for piecewise-constant functions on [0, 1)."""

    breakpoints: tuple
    values: tuple

    def _check_partition(self) -> None:
        bps, vals = self.breakpoints, self.values
        if len(bps) < 2:
            raise ValueError("need at least two breakpoints")
        if len(vals) != len(bps) - 1:
            raise ValueError(
                f"{len(vals)} values for {len(bps) - 1} intervals"
            )
        if bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        for a, b in zip(bps, bps[1:]):
            if not a < b:
                raise ValueError("breakpoints must be strictly increasing")

    def _check_monotone(self) -> None:
        for a, b in zip(self.values, self.values[1:]):
            if not a <= b:
                raise ValueError("quantile values must be nondecreasing")

    @property
    def n(self) -> int:
        """Number of intervals in this representation."""
        return len(self.values)

    def pieces(self) -> Iterator[tuple]:
        """Yield ``(width, value)`` for each interval."""
        bps = self.breakpoints
        for j, v in enumerate(self.values):
            yield bps[j + 1] - bps[j], v

    def __call__(self, u):
        if u < 0 or u >= 1:
            raise ValueError(f"u={u} outside [0, 1)")
        return self.values[bisect_right(self.breakpoints, u) - 1]


@dataclass(frozen=True, eq=False)
class StepQuantile(_StepFunction):
    """Exact nondecreasing right-continuous step function on (0, 1).

    Equality and hashing are functional: two instances compare equal when
    they describe the same function, whatever their breakpoint layout.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(to_rational(b) for b in self.breakpoints))
        object.__setattr__(self, "values", tuple(to_rational(v) for v in self.values))
        self._check_partition()
        self._check_monotone()

    @cached_property
    def canonical(self) -> StepQuantile:
        """Same function with equal adjacent intervals merged."""
        bps, vals = _coalesce(self.breakpoints, self.values)
        if len(vals) == len(self.values):
            return self
        return StepQuantile(bps, vals)

    def __eq__(self, other):
        if not isinstance(other, StepQuantile):
            return NotImplemented
        a, b = self.canonical, other.canonical
        return a.breakpoints == b.breakpoints and a.values == b.values

    def __hash__(self):
        c = self.canonical
        return hash((c.breakpoints, c.values))

    def __repr__(self):
        bps = ", ".join(map(str, self.breakpoints))
        vals = ", ".join(map(str, self.values))
        return f"StepQuantile(breakpoints=({bps}), values=({vals}))"

    @property
    def min_value(self) -> Fraction:
        return self.values[0]

    @property
    def max_value(self) -> Fraction:
        return self.values[-1]

    def grid_size(self) -> int:
        """Smallest n such that every breakpoint is a multiple of 1/n."""
        n = 1
        for b in self.breakpoints:
            n = _lcm(n, b.denominator)
        return n

    def dice_faces(self, n: int | None = None) -> tuple[Fraction, ...]:
        """Face values ``(x(0), x(1/n), ..., x((n-1)/n))`` of this function as an n-sided die.

        Raises ValueError if some breakpoint is not on the ``1/n`` grid.
        """
        if n is None:
            n = self.grid_size()
        for b in self.breakpoints:
            if (b * n).denominator != 1:
                raise ValueError(f"breakpoint {b} is not on the 1/{n} grid")
        return tuple(self(Fraction(j, n)) for j in range(n))

    def to_dict(self) -> dict:
        return {
            "breakpoints": [format_rational(b) for b in self.breakpoints],
            "values": [format_rational(v) for v in self.values],
        }

    @classmethod
    def from_dict(cls, data: dict) -> StepQuantile:
        return cls(tuple(data["breakpoints"]), tuple(data["values"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> StepQuantile:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class FloatQuantile(_StepFunction):
    """Floating-point counterpart of :class:`StepQuantile`.

    Only meant for inputs with irrational parameters.  Ordering is checked
    without tolerance.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        self._check_partition()
        self._check_monotone()

    def to_dict(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a * b // gcd(a, b)


def _coalesce(bps: Sequence, vals: Sequence) -> tuple[tuple, tuple]:
    out_b = [bps[0]]
    out_v = [vals[0]]
    for j in range(1, len(vals)):
        if vals[j] == out_v[-1]:
            continue
        out_b.append(bps[j])
        out_v.append(vals[j])
    out_b.append(bps[-1])
    return tuple(out_b), tuple(out_v)


def make_dice(faces: Iterable[RationalLike]) -> StepQuantile:
    """Quantile function of a fair die: ``x(u) = c_{[nu]+1}`` with sorted faces.

    >>> make_dice([9, 2, 4]).values
    (Fraction(2, 1), Fraction(4, 1), Fraction(9, 1))
    """
    cs = sorted(to_rational(c) for c in faces)
    n = len(cs)
    if n == 0:
        raise ValueError("a die needs at least one face")
    return StepQuantile(tuple(Fraction(j, n) for j in range(n + 1)), tuple(cs))


def constant(value: RationalLike = 0) -> StepQuantile:
    return StepQuantile((ZERO, ONE), (to_rational(value),))


def evaluate(q: _StepFunction, u) -> Fraction:
    """Value of ``q`` at ``u`` in [0, 1); breakpoints belong to the interval on their right."""
    return q(u)


def _merged_breakpoints(functions: Iterable[_StepFunction]) -> list:
    return sorted(set().union(*(f.breakpoints for f in functions)))


def linear_combination(terms: Sequence[tuple[RationalLike, StepQuantile]]) -> StepQuantile:
    """Pointwise ``sum(coef * q)`` over ``terms`` with all coefficients >= 0.

    An empty combination is the zero function.
    """
    terms = [(to_rational(c), q) for c, q in terms]
    if any(c < 0 for c, _ in terms):
        raise ValueError("negative coefficients would break monotonicity")
    if not terms:
        return constant(0)
    bps = _merged_breakpoints(q for _, q in terms)
    vals = [sum((c * q(left) for c, q in terms), ZERO) for left in bps[:-1]]
    return StepQuantile(*_coalesce(bps, vals))


def affine(shift: StepQuantile, scale: RationalLike, x: StepQuantile) -> StepQuantile:
    """``shift + scale * x`` on the merged breakpoint grid, equal neighbours coalesced."""
    scale = to_rational(scale)
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    bps = _merged_breakpoints((shift, x))
    vals = [shift(left) + scale * x(left) for left in bps[:-1]]
    return StepQuantile(*_coalesce(bps, vals))


class Separation(NamedTuple):
    r: Fraction
    R: Fraction


class SeparationError(ValueError):
    """Two distinct members of a tuple share a value (r = 0)."""

    def __init__(self, i: int, j: int, value: Fraction):
        self.pair = (i, j)
        self.value = value
        super().__init__(
            f"members {i + 1} and {j + 1} both take the value {value}; ranges must be disjoint"
        )


def _min_gap(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    # both sorted ascending
    i = j = 0
    best = None
    while i < len(a) and j < len(b):
        d = a[i] - b[j]
        gap = abs(d)
        if best is None or gap < best:
            best = gap
        if d < 0:
            i += 1
        else:
            j += 1
    return best


def compute_separation(functions: Sequence[StepQuantile]) -> Separation:
    """Smallest and largest ``|x_i(u) - x_j(v)|`` over distinct members ``i != j``.

    Raises SeparationError when r would be 0.
    """
    if len(functions) < 2:
        raise ValueError("need at least two functions")
    r = R = None
    for i, fi in enumerate(functions):
        for j in range(i + 1, len(functions)):
            fj = functions[j]
            gap = _min_gap(fi.values, fj.values)
            if gap == 0:
                shared = sorted(set(fi.values) & set(fj.values))[0]
                raise SeparationError(i, j, shared)
            spread = max(fi.max_value - fj.min_value, fj.max_value - fi.min_value)
            r = gap if r is None else min(r, gap)
            R = spread if R is None else max(R, spread)
    return Separation(r, R)
