"""Generations of quantile functions grown from an intransitive basic tuple.

Starting from ``A(0) = {0}``, every function ``x`` of generation ``k - 1``
spawns ``x + eps**k * x0_j`` for ``j = 1..m``, the child index being the
parent index with ``j`` appended.  With ``lambda = 1/eps >= 1 + R/r`` the
preference between two members depends only on the basic pair at the first
position where their indexes differ; this module builds the generations and
checks that claim, and its consequences, exhaustively.
"""

from __future__ import annotations

import itertools
import math
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

from .preference import CycleReport, cycle_report, precedes, rho_q
from .quantile import (
    ONE,
    StepQuantile,
    _StepFunction,
    _merged_breakpoints,
    affine,
    compute_separation,
    constant,
    format_rational,
    linear_combination,
    to_rational,
)

DEFAULT_MEMBER_CAP = 10**6
DEFAULT_PAIR_CAP = 10**7
DEFAULT_PAIR_SAMPLE = 100_000

Index = tuple  # tuple[int, ...], digits in 1..m


class BasicTupleError(ValueError):
    pass


class AdmissibilityError(ValueError):
    """The contraction factor is too weak for the basic tuple."""


class MemberCapError(ValueError):
    pass


@dataclass(frozen=True)
class BasicTuple:
    members: tuple[StepQuantile, ...]
    r: Fraction
    R: Fraction
    cycle: CycleReport
    name: str | None = None
    labels: tuple[str, ...] | None = None

    @property
    def m(self) -> int:
        return len(self.members)

    @cached_property
    def rho_table(self) -> list[list[Fraction]]:
        """``rho_table[i][j] = rho_q(x0_{i+1}, x0_{j+1})``."""
        return [[rho_q(a, b) for b in self.members] for a in self.members]

    def to_dict(self) -> dict:
        out = {}
        if self.name is not None:
            out["name"] = self.name
        if self.labels is not None:
            out["labels"] = list(self.labels)
        out["members"] = [q.to_dict() for q in self.members]
        out["r"] = format_rational(self.r)
        out["R"] = format_rational(self.R)
        out["cycle"] = self.cycle.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> BasicTuple:
        """Rebuild and revalidate from ``to_dict`` output.

        A ``"dice"`` list of face lists is accepted in place of ``"members"``.
        """
        from .quantile import make_dice

        if "members" in data:
            members = [StepQuantile.from_dict(d) for d in data["members"]]
        elif "dice" in data:
            members = [make_dice(faces) for faces in data["dice"]]
        else:
            raise BasicTupleError("expected a 'members' or 'dice' list")
        labels = data.get("labels")
        return validate_basic(members, name=data.get("name"), labels=labels)


def validate_basic(
    functions: Sequence[StepQuantile], name: str | None = None, labels=None
) -> BasicTuple:
    """Check disjoint ranges and the intransitive cycle in the given order."""
    functions = tuple(functions)
    if len(functions) < 3:
        raise BasicTupleError(f"a basic tuple needs m >= 3 members, got {len(functions)}")
    try:
        r, R = compute_separation(functions)
    except ValueError as exc:
        raise BasicTupleError(str(exc)) from exc
    cycle = cycle_report(functions)
    if not cycle.is_intransitive:
        i, j = cycle.failing_edges[0]
        raise BasicTupleError(
            f"not intransitive in this order: P(X{i} < X{j}) = "
            f"{cycle.pairwise_probabilities[i - 1]} does not exceed 1/2"
        )
    return BasicTuple(functions, r, R, cycle, name, tuple(labels) if labels else None)


@dataclass(frozen=True)
class LambdaConfig:
    lam: Fraction
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lam", to_rational(self.lam))
        if self.lam <= 1:
            raise AdmissibilityError(f"lambda must exceed 1, got {self.lam}")

    @property
    def epsilon(self) -> Fraction:
        return 1 / self.lam

    def check(self, basic: BasicTuple) -> LambdaConfig:
        bound = 1 + basic.R / basic.r
        if self.strict and not self.lam > bound:
            raise AdmissibilityError(
                f"lambda = {self.lam} must be strictly greater than 1 + R/r = {bound}"
            )
        if not self.strict and not self.lam >= bound:
            raise AdmissibilityError(f"lambda = {self.lam} is below 1 + R/r = {bound}")
        return self


def lambda_config(basic: BasicTuple, lam, strict: bool = False) -> LambdaConfig:
    return LambdaConfig(to_rational(lam), strict).check(basic)


def minimal_lambda(basic: BasicTuple, strict: bool = False) -> LambdaConfig:
    """``1 + R/r`` itself, or in strict mode the smallest integer above it."""
    bound = 1 + basic.R / basic.r
    if strict:
        return LambdaConfig(Fraction(math.floor(bound) + 1), True)
    return LambdaConfig(bound, False)


def member_cap() -> int:
    raw = os.environ.get("METADICE_MEMBER_CAP")
    return int(raw) if raw else DEFAULT_MEMBER_CAP


def _check_digits(index: Sequence[int], m: int) -> None:
    for d in index:
        if not 1 <= d <= m:
            raise ValueError(f"digit {d} outside 1..{m}")


@dataclass(frozen=True, eq=False)
class InfiniteIndex:
    """The infinite word ``prefix + period + period + ...``.

    Equality compares the words, not the presentations.
    """

    prefix: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise ValueError("period must be nonempty")
        if any(d < 1 for d in self.prefix + self.period):
            raise ValueError("digits start at 1")

    def digit(self, position: int) -> int:
        """Digit at 1-based ``position``."""
        L = len(self.prefix)
        if position <= L:
            return self.prefix[position - 1]
        return self.period[(position - L - 1) % len(self.period)]

    @cached_property
    def canonical(self) -> InfiniteIndex:
        period = self.period
        q = len(period)
        for d in range(1, q + 1):
            if q % d == 0 and period[:d] * (q // d) == period:
                period = period[:d]
                break
        prefix = list(self.prefix)
        while prefix and prefix[-1] == period[-1]:
            prefix.pop()
            period = (period[-1],) + period[:-1]
        return InfiniteIndex(tuple(prefix), period)

    def __eq__(self, other):
        if not isinstance(other, InfiniteIndex):
            return NotImplemented
        a, b = self.canonical, other.canonical
        return a.prefix == b.prefix and a.period == b.period

    def __hash__(self):
        c = self.canonical
        return hash((c.prefix, c.period))

    def __str__(self):
        head = "".join(map(str, self.prefix))
        return f"{head}({''.join(map(str, self.period))})"


def _digit_at(word, position: int):
    if isinstance(word, InfiniteIndex):
        return word.digit(position)
    return word[position - 1] if position <= len(word) else None


def first_divergence(a, b) -> int:
    """1-based position of the first digit where two index words differ.

    Finite indexes are tuples, infinite ones InfiniteIndex.  A finite word
    that is a proper prefix of the other diverges right after its end.
    """
    fa, fb = isinstance(a, InfiniteIndex), isinstance(b, InfiniteIndex)
    if fa and fb:
        limit = max(len(a.prefix), len(b.prefix)) + math.lcm(len(a.period), len(b.period))
    elif fa:
        limit = len(b) + 1
    elif fb:
        limit = len(a) + 1
    else:
        limit = max(len(a), len(b))

    for pos in range(1, limit + 1):
        if _digit_at(a, pos) != _digit_at(b, pos):
            return pos
    raise ValueError("indexes are identical")


def function_for_index(basic: BasicTuple, config: LambdaConfig, index: Index) -> StepQuantile:
    """Closed form ``sum_l eps**l * x0_{i_l}``, gathered per basic member."""
    _check_digits(index, basic.m)
    eps = config.epsilon
    coeffs = [Fraction(0)] * basic.m
    for l, d in enumerate(index, start=1):
        coeffs[d - 1] += eps**l
    return linear_combination([(c, q) for c, q in zip(coeffs, basic.members) if c])


def infinite_index_function(
    basic: BasicTuple, config: LambdaConfig, idx: InfiniteIndex
) -> StepQuantile:
    """Sum of the infinite series for an eventually periodic index.

    The periodic tail sums to ``eps**L * (sum_t eps**t x0_{period_t}) / (1 - eps**q)``.
    """
    if not config.strict:
        raise AdmissibilityError("the infinite generation needs a strict lambda")
    _check_digits(idx.prefix + idx.period, basic.m)
    eps = config.epsilon
    L, q = len(idx.prefix), len(idx.period)
    coeffs = [Fraction(0)] * basic.m
    for l, d in enumerate(idx.prefix, start=1):
        coeffs[d - 1] += eps**l
    tail = eps**L / (1 - eps**q)
    for t, d in enumerate(idx.period, start=1):
        coeffs[d - 1] += tail * eps**t
    return linear_combination([(c, x) for c, x in zip(coeffs, basic.members) if c])


@dataclass(frozen=True)
class Generation:
    basic: BasicTuple
    config: LambdaConfig
    k: int
    members: dict  # Index -> StepQuantile, lexicographic order

    @property
    def m(self) -> int:
        return self.basic.m

    @property
    def epsilon(self) -> Fraction:
        return self.config.epsilon

    def __len__(self):
        return len(self.members)

    @cached_property
    def _items(self) -> list:
        return list(self.members.items())

    def group(self, prefix: Sequence[int]) -> Iterator[tuple[Index, StepQuantile]]:
        """Members whose index starts with ``prefix``.

        Members are in lexicographic order, so the group is one contiguous
        slice located arithmetically.
        """
        prefix = tuple(prefix)
        p = len(prefix)
        if p > self.k:
            raise ValueError("prefix longer than the indexes")
        _check_digits(prefix, self.m)
        size = self.m ** (self.k - p)
        start = sum((d - 1) * self.m ** (self.k - l) for l, d in enumerate(prefix, start=1))
        return itertools.islice(self._items, start, start + size)

    def to_dict(self) -> dict:
        basic = self.basic.name if self.basic.name else self.basic.to_dict()
        return {
            "basic": basic,
            "lambda": format_rational(self.config.lam),
            "strict": self.config.strict,
            "k": self.k,
            "members": [
                {"index": list(idx), **q.to_dict()} for idx, q in self.members.items()
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Generation:
        basic_data = data["basic"]
        if isinstance(basic_data, str):
            from .presets import get_preset

            basic = get_preset(basic_data)
        else:
            basic = BasicTuple.from_dict(basic_data)
        config = LambdaConfig(to_rational(data["lambda"]), bool(data.get("strict", False)))
        members = {
            tuple(entry["index"]): StepQuantile.from_dict(entry) for entry in data["members"]
        }
        return cls(basic, config, int(data["k"]), members)


def build_generation(
    basic: BasicTuple,
    config: LambdaConfig,
    k: int,
    cap: int | None = None,
    crosscheck: bool = True,
) -> Generation:
    """Grow ``A(k)`` level by level from ``A(0) = {0}``.

    With ``crosscheck`` every member is compared against the closed form.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    config.check(basic)
    cap = member_cap() if cap is None else cap
    if basic.m**k > cap:
        raise MemberCapError(f"{basic.m}**{k} members exceed the cap of {cap}")
    eps = config.epsilon
    layer: dict = {(): constant(0)}
    for level in range(1, k + 1):
        scale = eps**level
        layer = {
            idx + (j,): affine(x, scale, x0)
            for idx, x in layer.items()
            for j, x0 in enumerate(basic.members, start=1)
        }
    if crosscheck:
        for idx, x in layer.items():
            if x != function_for_index(basic, config, idx):
                raise AssertionError(f"recursive and closed forms disagree at {idx}")
    return Generation(basic, config, k, layer)


def generation_by_recurrence(prev: Generation) -> Generation:
    """``A(k)`` as the disjoint union of ``eps*x0_i + eps*A(k-1)`` over i."""
    eps = prev.epsilon
    members = {}
    for i, x0 in enumerate(prev.basic.members, start=1):
        head = linear_combination([(eps, x0)])
        for idx, x in prev.members.items():
            members[(i,) + idx] = affine(head, eps, x)
    return Generation(prev.basic, prev.config, prev.k + 1, members)


@dataclass
class Violation:
    indexes: tuple
    observed: object
    expected: object
    level_set_value: object = None

    def to_dict(self) -> dict:
        def fmt(v):
            if isinstance(v, Fraction):
                return format_rational(v)
            if isinstance(v, InfiniteIndex):
                return str(v)
            if isinstance(v, tuple):
                return [fmt(x) for x in v]
            return v

        out = {
            "indexes": [fmt(i) for i in self.indexes],
            "observed": fmt(self.observed),
            "expected": fmt(self.expected),
        }
        if self.level_set_value is not None:
            out["level_set_value"] = fmt(self.level_set_value)
            out["explained_by_prefix"] = self.level_set_value == self.observed
        return out


@dataclass
class PairReport:
    """Outcome of a pairwise relation check over members."""

    pairs_checked: int
    violations: list = field(default_factory=list)
    sampled: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def sign_violations(self) -> list:
        """Violations where even the sign of the preference differs."""
        return [v for v in self.violations if _sign(v.observed) != _sign(v.expected)]

    def to_dict(self) -> dict:
        return {
            "pairs_checked": self.pairs_checked,
            "sampled": self.sampled,
            "value_violations": len(self.violations),
            "sign_violations": len(self.sign_violations),
            "violations": [v.to_dict() for v in self.violations],
            "ok": self.ok,
        }


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _pairs(n: int, cap: int, sample: int, seed: int):
    total = n * (n - 1) // 2
    if total <= cap:
        return itertools.combinations(range(n), 2), total, False
    rng = random.Random(seed)

    def draw():
        for _ in range(sample):
            a, b = rng.sample(range(n), 2)
            yield (a, b) if a < b else (b, a)

    return draw(), sample, True


def prefix_level_rho(basic: BasicTuple, config: LambdaConfig, a: Index, b: Index) -> Fraction:
    """Preference of two members predicted from their shared prefix.

    With independent arguments the shared prefix ``P`` does not cancel:
    ``P(u') - P(u'')`` only vanishes when ``u'`` and ``u''`` fall in the same
    level set of ``P``.  Off those sets the contributions cancel in pairs as
    long as the jumps of ``P`` dominate, so the preference is the sum over
    level sets ``I`` of ``P`` of the integral over ``I x I`` of
    ``sign(x0_a(u') - x0_b(u''))``, with ``a, b`` the digits at the first
    divergence.  Equals the basic preference when ``P`` is constant.
    """
    nu = first_divergence(a, b)
    da, db = _digit_at(a, nu), _digit_at(b, nu)
    if da is None or db is None:
        raise ValueError("one index is a prefix of the other")
    prefix = function_for_index(basic, config, tuple(_digit_at(a, l) for l in range(1, nu)))
    xa = basic.members[da - 1]
    xb = basic.members[db - 1]
    bps = _merged_breakpoints((prefix, xa, xb))
    levels: dict = {}
    for lo, hi in zip(bps, bps[1:]):
        levels.setdefault(prefix(lo), []).append((hi - lo, xa(lo), xb(lo)))
    total = Fraction(0)
    for pieces in levels.values():
        for w1, v1, _ in pieces:
            for w2, _, v2 in pieces:
                total += w1 * w2 * ((v1 > v2) - (v1 < v2))
    return total


def verify_theorem1(
    gen: Generation,
    pair_cap: int = DEFAULT_PAIR_CAP,
    sample_size: int = DEFAULT_PAIR_SAMPLE,
    seed: int = 0,
) -> PairReport:
    """Each member pair has exactly the preference of the basic pair where their indexes first differ.

    Exhaustive up to ``pair_cap`` pairs, otherwise a seeded sample.
    """
    if gen.k < 1:
        raise ValueError("needs k >= 1")
    items = gen._items
    table = gen.basic.rho_table
    pairs, count, sampled = _pairs(len(items), pair_cap, sample_size, seed)
    violations = []
    for a, b in pairs:
        (ia, xa), (ib, xb) = items[a], items[b]
        nu = first_divergence(ia, ib)
        expected = table[ia[nu - 1] - 1][ib[nu - 1] - 1]
        observed = rho_q(xa, xb)
        if observed != expected:
            level = prefix_level_rho(gen.basic, gen.config, ia, ib)
            violations.append(Violation((ia, ib), observed, expected, level))
    return PairReport(count, violations, sampled)


@dataclass
class BijectionReport:
    members: int
    distinct: int
    duplicates: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.members == self.distinct

    def to_dict(self) -> dict:
        return {
            "members": self.members,
            "distinct": self.distinct,
            "duplicates": [[list(a), list(b)] for a, b in self.duplicates],
            "ok": self.ok,
        }


def verify_bijection(gen: Generation) -> BijectionReport:
    seen: dict = {}
    dups = []
    for idx, x in gen.members.items():
        if x in seen:
            dups.append((seen[x], idx))
        else:
            seen[x] = idx
    return BijectionReport(len(gen.members), len(seen), dups)


@dataclass
class MetaIntransitivityReport:
    order: int
    levels_checked: list
    groups_checked: int
    cross_pairs_checked: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "levels_checked": self.levels_checked,
            "groups_checked": self.groups_checked,
            "cross_pairs_checked": self.cross_pairs_checked,
            "violations": [v.to_dict() for v in self.violations],
            "ok": self.ok,
        }


def verify_meta_intransitivity(gen: Generation) -> MetaIntransitivityReport:
    """Check the nested set-level cycles of ``A(k)``.

    At level ``p`` (1..k) and for every parent prefix of length ``p - 1``,
    the ``m`` sibling groups ``prefix + (j,)`` must satisfy
    ``G_1 < G_2 < ... < G_m < G_1`` with every cross pair of consecutive
    groups obeying the precedence.  Level ``k`` has singleton groups, i.e.
    the innermost tuples themselves.
    """
    if gen.k < 2:
        raise ValueError("meta-intransitivity needs k >= 2")
    m = gen.m
    groups = cross = 0
    violations = []
    for p in range(1, gen.k + 1):
        for parent in itertools.product(range(1, m + 1), repeat=p - 1):
            siblings = [list(gen.group(parent + (j,))) for j in range(1, m + 1)]
            groups += m
            for j in range(m):
                lower, upper = siblings[j], siblings[(j + 1) % m]
                for ia, xa in lower:
                    for ib, xb in upper:
                        cross += 1
                        if not precedes(xa, xb):
                            violations.append(Violation((ia, ib), False, True))
    return MetaIntransitivityReport(gen.k - 1, list(range(1, gen.k + 1)), groups, cross, violations)


def verify_theorem2(
    basic: BasicTuple, config: LambdaConfig, indexes: Sequence[InfiniteIndex]
) -> PairReport:
    """First-divergence check for exactly summed infinite-index members."""
    if not config.strict:
        raise AdmissibilityError("the infinite generation needs a strict lambda")
    config.check(basic)
    indexes = list(indexes)
    if len(set(indexes)) != len(indexes):
        raise ValueError("infinite indexes must be pairwise distinct words")
    funcs = [infinite_index_function(basic, config, idx) for idx in indexes]
    table = basic.rho_table
    violations = []
    count = 0
    for a, b in itertools.combinations(range(len(indexes)), 2):
        count += 1
        ia, ib = indexes[a], indexes[b]
        nu = first_divergence(ia, ib)
        expected = table[ia.digit(nu) - 1][ib.digit(nu) - 1]
        observed = rho_q(funcs[a], funcs[b])
        if observed != expected:
            level = prefix_level_rho(basic, config, ia, ib)
            violations.append(Violation((ia, ib), observed, expected, level))
    return PairReport(count, violations)


@dataclass(frozen=True)
class WeightFunction(_StepFunction):
    """Piecewise-constant weight on [0, 1]; no monotonicity required."""

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(to_rational(b) for b in self.breakpoints))
        object.__setattr__(self, "values", tuple(to_rational(v) for v in self.values))
        self._check_partition()

    @classmethod
    def constant(cls, value=1) -> WeightFunction:
        return cls((0, 1), (value,))


def j_functional(x: StepQuantile, f: WeightFunction) -> Fraction:
    """Exact ``integral_0^1 f(u) x(u) du`` on the common refinement."""
    bps = _merged_breakpoints((x, f))
    return sum(
        ((b - a) * f(a) * x(a) for a, b in zip(bps, bps[1:])),
        Fraction(0),
    )


@dataclass
class PropositionReport:
    applicable: bool
    K: Fraction | None
    expected: Fraction | None
    members_checked: int = 0
    violations: list = field(default_factory=list)
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "K": None if self.K is None else format_rational(self.K),
            "expected": None if self.expected is None else format_rational(self.expected),
            "members_checked": self.members_checked,
            "violations": [v.to_dict() for v in self.violations],
            "reason": self.reason,
            "ok": self.ok,
        }


def _common_value(basic: BasicTuple, f: WeightFunction):
    vals = [j_functional(x, f) for x in basic.members]
    if len(set(vals)) != 1:
        return None, "basic members have different J_f values: " + ", ".join(
            map(format_rational, vals)
        )
    return vals[0], None


def verify_proposition1(gen: Generation, f: WeightFunction) -> PropositionReport:
    """If ``J_f`` is the same K on all basic members, every member of ``A(k)``
    has ``J_f = K * eps * (1 - eps**k) / (1 - eps)``."""
    K, reason = _common_value(gen.basic, f)
    if K is None:
        return PropositionReport(False, None, None, reason=reason)
    eps = gen.epsilon
    expected = K * eps * (1 - eps**gen.k) / (1 - eps)
    violations = []
    for idx, x in gen.members.items():
        got = j_functional(x, f)
        if got != expected:
            violations.append(Violation((idx,), got, expected))
    return PropositionReport(True, K, expected, len(gen.members), violations)


def verify_proposition2(
    basic: BasicTuple,
    config: LambdaConfig,
    indexes: Sequence[InfiniteIndex],
    f: WeightFunction,
) -> PropositionReport:
    """Infinite-index counterpart: ``J_f = K * eps / (1 - eps)``."""
    if not config.strict:
        raise AdmissibilityError("the infinite generation needs a strict lambda")
    config.check(basic)
    K, reason = _common_value(basic, f)
    if K is None:
        return PropositionReport(False, None, None, reason=reason)
    eps = config.epsilon
    expected = K * eps / (ONE - eps)
    violations = []
    for idx in indexes:
        got = j_functional(infinite_index_function(basic, config, idx), f)
        if got != expected:
            violations.append(Violation((idx,), got, expected))
    return PropositionReport(True, K, expected, len(indexes), violations)
