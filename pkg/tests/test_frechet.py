from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfembed.analysis import frechet_isometry_defect
from lfembed.frechet import BallDomainError, BlockStructureError, CoordVector, kuratowski, phi, support_size
from lfembed.generators import random_graph, random_tree
from lfembed.metric import MetricSpace, ball, from_graph, rescale_to_unit_gap


def _sup(u, v):
    return max(abs(a - b) for a, b in zip(u.values, v.values))


def path_space():
    # t0 - a - b with |a| = 2, |b| = 4: everything lies in B_1
    return from_graph([("t0", "a", 2), ("a", "b", 2)], "t0")


def test_path_example_values():
    sp = path_space()
    a, b = sp.index("a"), sp.index("b")
    fa, fb = phi(sp, 1, a), phi(sp, 1, b)
    assert fa.values == (2, -2, -2)  # coordinates ordered t0, a, b
    assert fb.values == (4, 0, -4)
    assert _sup(fa, fb) == sp.d(a, b) == 2


def test_phi_of_basepoint_is_zero():
    sp = path_space()
    assert phi(sp, 1, sp.basepoint).is_zero()


def test_phi_outside_ball_is_a_domain_error():
    sp = path_space()
    with pytest.raises(BallDomainError):
        phi(sp, 0, sp.index("b"))


@settings(max_examples=25, deadline=None)
@given(st.integers(8, 30), st.integers(0, 10**6))
def test_each_phi_n_is_an_isometry_with_norm_equal_to_distance_from_basepoint(n, seed):
    sp, _ = rescale_to_unit_gap(random_tree(n, seed))
    for k in range(5):
        pts = ball(sp, k)
        vecs = {t: phi(sp, k, t, pts) for t in pts}
        for t in pts:
            assert vecs[t].norm() == sp.norms[t]
            for s in pts:
                assert _sup(vecs[t], vecs[s]) == sp.d(s, t)
        assert frechet_isometry_defect(sp, k) == 0


def test_kuratowski_is_isometric_on_whole_space():
    sp = random_graph(20, 0.2, seed=2)
    k = kuratowski(sp)
    for i in range(sp.size):
        for j in range(sp.size):
            assert _sup(k[i], k[j]) == sp.d(i, j)


def test_kuratowski_two_points():
    sp = MetricSpace.from_matrix(["t0", "x"], [[0, 3], [3, 0]])
    k = kuratowski(sp)
    assert _sup(k[0], k[1]) / sp.d(0, 1) == 1


def test_support_size_counts_nonzero_coordinates():
    sp = path_space()
    k = kuratowski(sp)
    assert support_size(k[sp.basepoint]) == 0
    assert support_size(k[sp.index("b")]) == 2  # the a coordinate vanishes on the geodesic


def test_coord_vector_algebra_and_mismatch():
    u = CoordVector((0, 1), (F(1), F(-2)))
    v = CoordVector((0, 1), (F(3), F(1, 2)))
    assert (u + v).values == (4, F(-3, 2))
    assert (u - v).values == (-2, F(-5, 2))
    assert (2 * u).values == (2, -4) and (-u).values == (-1, 2)
    assert u[1] == -2 and u.norm() == 2
    with pytest.raises(BlockStructureError):
        u + CoordVector((1, 0), (F(0), F(0)))
