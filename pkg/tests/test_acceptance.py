"""Acceptance criteria, one test each, at their stated tolerances.

Run under pytest for a PASS/FAIL summary, or directly with
``python tests/test_acceptance.py`` for one line per criterion.
"""

from __future__ import annotations

import json
import math
import random
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from metadice import (
    AdmissibilityError,
    InfiniteIndex,
    StepQuantile,
    WeightFunction,
    build_generation,
    compute_separation,
    cycle_report,
    dimension_report,
    embed_points,
    export_csv,
    function_for_index,
    get_preset,
    j_functional,
    lambda_config,
    make_dice,
    monte_carlo_rho,
    parse_csv,
    rho_q,
    trybula_bound,
    trybula_triplet,
    verify_bijection,
    verify_meta_intransitivity,
    verify_proposition1,
    verify_proposition2,
    verify_theorem1,
    verify_theorem2,
    win_probabilities,
)
from metadice.fractal import self_similar_union
from metadice.generation import Generation
from metadice.preference import GOLDEN_P
from metadice.presets import LO_SHU

from oracles import dice_member, rho_double_sum

# (preset, lambda, k) configurations checked exhaustively
EXHAUSTIVE = [("sid", 5, 3, 351), ("ed", 7, 2, 120), ("cid", 9, 3, 351)]


def _gen(name, lam, k, strict=False):
    basic = get_preset(name)
    return build_generation(basic, lambda_config(basic, lam, strict), k)


def test_01_preset_cycles_exact():
    sid = cycle_report(get_preset("sid").members)
    cid = cycle_report(get_preset("cid").members)
    ed = get_preset("ed")
    assert ed.labels == ("A", "D", "C", "B")
    ed_rep = cycle_report(ed.members)
    assert cid.pairwise_probabilities == [F(5, 9)] * 3
    assert sid.pairwise_probabilities == [F(2, 3), F(2, 3), F(5, 9)]
    assert sid.min_probability == F(5, 9)
    assert ed_rep.pairwise_probabilities == [F(2, 3)] * 4
    assert all(r.is_intransitive for r in (sid, cid, ed_rep))


def test_02_separation_table():
    expected = {"ed": (1, 6), "cid": (1, 8), "sid": (1, 4)}
    for name, (r, R) in expected.items():
        sep = compute_separation(get_preset(name).members)
        assert (sep.r, sep.R) == (r, R), name


def test_03_trybula_bound_and_golden_triplet():
    assert abs(trybula_bound(3) - (math.sqrt(5) - 1) / 2) <= 1e-12
    assert abs(trybula_bound(4) - 2 / 3) <= 1e-12
    x, y, z = trybula_triplet(GOLDEN_P)
    for lo, hi in ((x, y), (y, z), (z, x)):
        assert abs(win_probabilities(lo, hi).less - GOLDEN_P) <= 1e-12


def test_04_first_divergence_exhaustive():
    failures = []
    for name, lam, k, pairs in EXHAUSTIVE:
        rep = verify_theorem1(_gen(name, lam, k))
        assert rep.pairs_checked == pairs, name
        if rep.violations:
            failures.append(
                f"{name} lambda={lam} k={k}: {len(rep.violations)}/{pairs} exact mismatches, "
                f"{len(rep.sign_violations)} sign flips"
            )
    assert not failures, "; ".join(failures)


def test_05_members_distinct():
    for name, lam, k, _ in EXHAUSTIVE:
        g = _gen(name, lam, k)
        rep = verify_bijection(g)
        assert rep.ok and rep.distinct == len(g) == g.m**k, name


def test_06_meta_intransitive_order_two():
    rep = verify_meta_intransitivity(_gen("sid", 5, 3))
    assert rep.order == 2
    assert rep.ok, f"{len(rep.violations)} cross-pair failures"
    assert rep.cross_pairs_checked > 0


def test_07_mean_of_every_member():
    ones = WeightFunction.constant(1)
    for name, lam, k, value in (("sid", 5, 3, F(62, 125)), ("cid", 9, 2, F(50, 81))):
        g = _gen(name, lam, k)
        rep = verify_proposition1(g, ones)
        assert rep.ok and rep.expected == value and rep.members_checked == 3**k, name
        # independent path: mean of the face list
        for x in g.members.values():
            assert j_functional(x, ones) == value
            assert sum(x.dice_faces(3), F(0)) / 3 == value


def test_08_periodic_mean():
    sid = get_preset("sid")
    config = lambda_config(sid, 6, strict=True)
    idx = [InfiniteIndex((), (1,)), InfiniteIndex((), (2,)), InfiniteIndex((), (1, 2, 3))]
    rep = verify_proposition2(sid, config, idx, WeightFunction.constant(1))
    assert rep.ok and rep.expected == F(2, 5) and rep.members_checked == 3


def test_09_periodic_triple_and_strict_rejection():
    sid = get_preset("sid")
    config = lambda_config(sid, 6, strict=True)
    triple = [InfiniteIndex((), (j,)) for j in (1, 2, 3)]
    rep = verify_theorem2(sid, config, triple)
    assert rep.ok and rep.pairs_checked == 3
    with pytest.raises(AdmissibilityError):
        lambda_config(sid, 5, strict=True)


def test_10_point_cloud():
    g3 = _gen("sid", 5, 3)
    cloud = embed_points(g3)
    assert len(cloud) == 27 and len(cloud.point_set()) == 27
    assert cloud.affine_rank == 2
    g2 = _gen("sid", 5, 2)
    basic_points = [x.dice_faces(3) for x in g3.basic.members]
    assert self_similar_union(basic_points, g3.epsilon, embed_points(g2)) == cloud.point_set()


def test_11_dimension_table():
    for name, d_sup in (("ed", 0.7124), ("sid", 0.6826), ("cid", 0.5)):
        rep = dimension_report(get_preset(name))
        assert abs(rep.d_sup - d_sup) <= 5e-5, name
        assert rep.fractal_dust, name


def test_12_monte_carlo_cid_edge():
    a, b = make_dice(LO_SHU["A"]), make_dice(LO_SHU["B"])
    exact = rho_q(a, b)
    assert exact == F(-1, 9)
    misses = 0
    for seed in range(20):
        est = monte_carlo_rho(a, b, 100_000, seed)
        if abs(est.estimate - float(exact)) > 3 * est.standard_error:
            misses += 1
    assert misses <= 1, f"{misses} of 20 seeds outside 3 standard errors"


def _random_quantile(rng):
    cuts = sorted(rng.sample(range(1, 12), rng.randint(0, 4)))
    bps = [F(0), *(F(c, 12) for c in cuts), F(1)]
    vals = sorted(F(rng.randint(-30, 30), rng.randint(1, 6)) for _ in range(len(bps) - 1))
    return StepQuantile(bps, vals)


def test_13_property_suite():
    rng = random.Random(20240607)
    for _ in range(1000):
        x, y = _random_quantile(rng), _random_quantile(rng)
        assert rho_q(x, y) == -rho_q(y, x) == rho_double_sum(x, y)
        assert sum(win_probabilities(x, y)) == 1
        faces = [F(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(rng.randint(1, 6))]
        shuffled = faces[:]
        rng.shuffle(shuffled)
        d1, d2 = make_dice(faces), make_dice(shuffled)
        assert (d1.breakpoints, d1.values) == (d2.breakpoints, d2.values)
        for q in (x, d1):
            text = q.to_json()
            back = StepQuantile.from_json(text)
            assert (back.breakpoints, back.values) == (q.breakpoints, q.values)
            assert back.to_json() == text

    # builder against closed form and a face-by-face sum, exhaustively
    for name, lam, k, _ in EXHAUSTIVE:
        g = _gen(name, lam, k)
        basic = get_preset(name)
        n = math.lcm(*(x.grid_size() for x in basic.members))
        faces = [x.dice_faces(n) for x in basic.members]
        for idx, x in g.members.items():
            assert x == function_for_index(basic, g.config, idx)
            assert x.dice_faces(n) == dice_member(faces, g.epsilon, idx)
        text = json.dumps(g.to_dict())
        assert json.dumps(Generation.from_dict(json.loads(text)).to_dict()) == text
        csv_text = export_csv(embed_points(g))
        assert export_csv(parse_csv(csv_text)) == csv_text


CRITERIA = [
    (1, "preset cycles exact", test_01_preset_cycles_exact),
    (2, "separation table", test_02_separation_table),
    (3, "trybula bound and golden triplet", test_03_trybula_bound_and_golden_triplet),
    (4, "first-divergence relations, exhaustive", test_04_first_divergence_exhaustive),
    (5, "members pairwise distinct", test_05_members_distinct),
    (6, "meta-intransitivity of order 2", test_06_meta_intransitive_order_two),
    (7, "common mean of finite generations", test_07_mean_of_every_member),
    (8, "common mean of periodic members", test_08_periodic_mean),
    (9, "periodic triple and strict rejection", test_09_periodic_triple_and_strict_rejection),
    (10, "point cloud size, rank and self-similarity", test_10_point_cloud),
    (11, "dimension table", test_11_dimension_table),
    (12, "Monte Carlo CID edge over 20 seeds", test_12_monte_carlo_cid_edge),
    (13, "property suite", test_13_property_suite),
]


def main() -> int:
    failed = 0
    for num, title, fn in CRITERIA:
        try:
            fn()
        except Exception as exc:  # report and continue
            failed += 1
            print(f"FAIL  criterion {num:2d}: {title}: {type(exc).__name__}: {exc}")
        else:
            print(f"PASS  criterion {num:2d}: {title}")
    print(f"{len(CRITERIA) - failed}/{len(CRITERIA)} criteria passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
