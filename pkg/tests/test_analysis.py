import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from lfembed.analysis import (
    certify_cases,
    default_thresholds,
    distortion,
    envelope_check,
    map_distortion,
    moduli,
)
from lfembed.blocks import BlockVector, make_operators
from lfembed.frechet import CoordVector, kuratowski
from lfembed.generators import random_graph, random_tree, uniform_points
from lfembed.glue import Embedding, build_embedding, embed
from lfembed.metric import MetricSpace
from lfembed.numeric import FLOAT


def star(norms):
    n = len(norms)
    return MetricSpace.from_matrix(
        range(n), [[0 if i == j else norms[i] + norms[j] for j in range(n)] for i in range(n)]
    )


STAR = star([0, 2, 3, 5, 9, 17, 40])


def test_two_point_distortion():
    # |t| = 3 already keeps B(t0, 1) = {t0}, so embed without rescaling
    sp = MetricSpace.from_matrix(["t0", "t"], [[0, 3], [3, 0]])
    emb = embed(sp, make_operators(sp, "identity"))
    rep = distortion(emb)
    assert (rep.lip, rep.colip, rep.dist) == (F(1, 2), 2, 1)
    assert rep.injective and rep.pair_count == 1
    env = envelope_check(emb)
    assert env.ok and env.min_ratio == env.max_ratio == F(1, 2)


def test_kuratowski_baseline_has_distortion_one():
    sp = random_graph(20, 0.2, seed=5)
    rep = map_distortion(sp, kuratowski(sp))
    assert rep.lip == rep.colip == rep.dist == 1


def test_map_distortion_agrees_with_distortion_on_embeddings():
    emb = build_embedding(random_tree(30, 4), "random", 2)
    assert map_distortion(emb.space, emb.image) == distortion(emb)


@pytest.mark.parametrize("mode, seed", [("identity", None), ("half", None), ("random", 1), ("random", 2)])
@pytest.mark.parametrize("make", [lambda: random_graph(40, 0.08, seed=7), lambda: random_tree(40, 3), lambda: STAR])
def test_distortion_matches_brute_force(make, mode, seed):
    emb = build_embedding(make(), mode, seed)
    rep = distortion(emb)
    lip, colip = oracles.oracle_distortion(emb.space.dist, emb.space.basepoint, emb.operators)
    assert rep.lip == lip and rep.colip == colip
    assert rep.lip <= 9 and rep.colip <= 24 and rep.dist <= 216


def test_non_injective_map_reports_witness():
    emb = build_embedding(star([0, 2, 3]), "identity")
    image = dict(emb.image)
    image[2] = image[1]
    forged = Embedding(emb.space, emb.operators, emb.shells, image)
    rep = distortion(forged)
    assert not rep.injective and rep.colip == math.inf and rep.colip_witness == (1, 2)
    assert not rep.within_bounds(FLOAT)


def test_case_examples():
    ledger = certify_cases(build_embedding(STAR, "identity"))
    assert ledger.ok
    by_case = {(pc.lip_case, pc.inv_case): pc for pc in ledger.pairs}
    names = lambda pc: [c.name for c in pc.checks]  # noqa: E731
    case1 = names(by_case[("I", "3")])
    assert "lip I: |t|+|t'| <= 3/2 |t'|" in case1 and "lip I: |f(t)-f(t')| <= 3d" in case1
    assert "inv 3: 24|f(t)-f(t')| >= 3/2 |t'|" in case1
    same = names(by_case[("II.1", "1")])
    assert "lip II.1: |f(t)-f(t')| <= 5d" in same and "inv 1: 16|f(t)-f(t')| >= d" in same
    adjacent = names(by_case[("II.2", "2")])
    assert "lip II.2: |f(t)-f(t')| <= 9d" in adjacent and "inv 2: 24|f(t)-f(t')| >= d" in adjacent


@pytest.mark.parametrize("mode, seed", [("identity", None), ("half", None), ("random", 5)])
def test_case_partition_rederived_from_norms(mode, seed):
    emb = build_embedding(random_graph(50, 0.06, seed=2), mode, seed)
    ledger = certify_cases(emb)
    assert ledger.ok and ledger.pair_count == 50 * 49 // 2
    seen = set()
    norms = emb.space.norms
    for pc in ledger.pairs:
        key = frozenset((pc.t, pc.s))
        assert key not in seen
        seen.add(key)
        assert norms[pc.t] <= norms[pc.s]
        assert (pc.lip_case, pc.inv_case) == oracles.case_labels(
            norms[pc.t], norms[pc.s], pc.t == emb.space.basepoint
        )
    assert len(seen) == 50 * 49 // 2


def test_certifier_flags_a_tampered_image():
    emb = build_embedding(random_tree(20, 1), "identity")
    image = dict(emb.image)
    t = 5
    blocks = dict(image[t].blocks)
    k, blk = next(iter(blocks.items()))
    blocks[k] = CoordVector(blk.ball_points, (blk.values[0] + 50,) + blk.values[1:])
    image[t] = BlockVector(blocks)
    ledger = certify_cases(Embedding(emb.space, emb.operators, emb.shells, image), keep=False)
    assert not ledger.ok
    assert (t, k) in ledger.point_failures
    assert any(t in (pc.t, pc.s) for pc in ledger.failures)


def test_keep_false_keeps_counts_only():
    emb = build_embedding(random_tree(20, 1), "half")
    full, lean = certify_cases(emb), certify_cases(emb, keep=False)
    assert lean.pairs == [] and len(full.pairs) == full.pair_count == lean.pair_count
    assert full.checks_run == lean.checks_run


def test_envelope_holds_and_is_tight_for_half_mode():
    emb = build_embedding(random_graph(40, 0.1, seed=1), "half")
    env = envelope_check(emb)
    assert env.ok and env.min_ratio >= F(1, 16) and env.max_ratio <= 1


def test_moduli_conventions_and_bounds():
    emb = build_embedding(random_tree(25, 2), "random", 3)
    d = [emb.space.dist[i][j] for i in range(25) for j in range(i + 1, 25)]
    lo, hi = min(d), max(d)
    prof = moduli(emb, [lo / 2, lo, (lo + hi) / 2, hi, 2 * hi])
    assert prof.ok
    assert prof.omega[0] == 0  # no pair with d <= t
    assert prof.rho[-1] == math.inf  # no pair with d >= t
    assert all(a <= b for a, b in zip(prof.omega, prof.omega[1:]))
    assert all(a <= b for a, b in zip(prof.rho, prof.rho[1:]))
    for t, w, r in zip(prof.thresholds, prof.omega, prof.rho):
        assert w <= 9 * t
        assert r == math.inf or r >= t / 24


def test_default_thresholds_probe_both_ends():
    emb = build_embedding(random_tree(12, 2), "identity")
    th = default_thresholds(emb)
    assert len(th) == 20 and all(a < b for a, b in zip(th, th[1:]))
    prof = moduli(emb)
    assert prof.omega[0] == 0 and prof.rho[-1] == math.inf


def test_moduli_rejects_bad_thresholds():
    emb = build_embedding(random_tree(6, 2), "identity")
    with pytest.raises(ValueError):
        moduli(emb, [2, 1])
    with pytest.raises(ValueError):
        moduli(emb, [0, 1])


def test_float_mode_agrees_with_exact_mode():
    exact = build_embedding(uniform_points(30, 2, seed=4), "random", 8)
    fl = build_embedding(uniform_points(30, 2, seed=4).as_mode(False), "random", 8)
    a, b = distortion(exact), distortion(fl)
    assert b.lip == pytest.approx(float(a.lip), rel=1e-9)
    assert b.colip == pytest.approx(float(a.colip), rel=1e-9)
    assert certify_cases(fl, keep=False).ok and envelope_check(fl).ok and moduli(fl).ok


@settings(max_examples=15, deadline=None)
@given(st.lists(st.fractions(F(1, 4), 50, max_denominator=8), min_size=1, max_size=9, unique=True),
       st.sampled_from([("identity", None), ("half", None), ("random", 3)]))
def test_bounds_hold_on_random_star_metrics(norms, cfg):
    emb = build_embedding(star([0] + norms), *cfg)
    rep = distortion(emb)
    assert rep.lip <= 9 and rep.colip <= 24
    assert certify_cases(emb, keep=False).ok
    assert envelope_check(emb).ok
