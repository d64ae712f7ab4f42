from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphrank.cpd import (
    CPDecomposition,
    Term,
    r7_explicit_cpd,
    canonical_terms,
    cpd_from_json,
    cpd_to_factors,
    cpd_to_json,
    from_labels,
    line_cpd,
    phi_split,
    r3_three_term_cpd,
    r3_two_term_cpd,
    rank_bounds,
    reconstruct,
    ring_cpd,
    same_terms,
    span_contains_support,
    support_membership,
    verify,
    verify_lower_bound_structure,
)
from graphrank.errors import InputError, ResourceError
from graphrank.exact import INV_SQRT2, ONE, ExactAmplitude, ExactVector
from graphrank.graph import Bipartition, all_cuts, complete, cut_rank, line, ring, star
from graphrank.statevec import build_graph_state, ket, product_state, project
from oracles import dense_graph_state, kron_list


def test_single_term_reconstructs_product():
    D = from_labels([(ONE, "++")])
    assert np.allclose(reconstruct(D).to_numpy(), [0.5] * 4)


def test_line2_base_case():
    D = from_labels([(INV_SQRT2, "0+"), (INV_SQRT2, "1-")])
    assert verify(D, build_graph_state(line(2))).exact
    assert same_terms(D, line_cpd(2))


def test_r3_three_term_expression_exact():
    assert verify(r3_three_term_cpd(), build_graph_state(ring(3))).exact
    assert len(r3_three_term_cpd()) == 3


def test_r3_has_two_term_decomposition():
    D = r3_two_term_cpd()
    assert len(D) == 2
    assert verify(D, build_graph_state(ring(3))).exact


@pytest.mark.parametrize("n", range(2, 13))
def test_line_cpd(n):
    D = line_cpd(n)
    assert len(D) == 2 ** (n // 2)
    assert verify(D, build_graph_state(line(n))).exact


def test_line3_shape():
    c = ExactAmplitude.from_triple(1, 0, 1)
    assert same_terms(line_cpd(3), from_labels([(c, "+0+"), (c, "-1-")]))


@pytest.mark.parametrize("m, count", [(3, 3), (5, 6), (7, 12), (9, 24), (11, 48)])
def test_ring_cpd(m, count):
    D = ring_cpd(m)
    assert len(D) == count
    assert verify(D, build_graph_state(ring(m))).exact


@pytest.mark.parametrize("m", [2, 4, 6, 1])
def test_ring_cpd_rejects_even(m):
    with pytest.raises(InputError):
        ring_cpd(m)


def test_generator_size_ceiling():
    with pytest.raises(ResourceError):
        line_cpd(25)


def test_phi_split_base_case():
    p0, p1 = phi_split(2)
    c = ExactAmplitude.from_triple(1, 0, 3)
    assert same_terms(p0, from_labels([(c, "0+0+0"), (c, "0-1-0")]))
    assert same_terms(p1, from_labels([(c, "0+0-1"), (c, "0-1+1")]))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_phi_split_sums_to_projected_line(n):
    p0, p1 = phi_split(n)
    assert len(p0) == len(p1) == 2 ** (n - 1)
    target = project(build_graph_state(line(2 * n + 1)), 0, 0)
    assert verify(p0 + p1, target).exact
    assert verify(p0, project(target, 2 * n, 0)).exact


def test_phi_split_floor():
    with pytest.raises(InputError):
        phi_split(1)


def test_r7_matches_corrected_listing():
    assert same_terms(ring_cpd(7), r7_explicit_cpd())
    assert verify(r7_explicit_cpd(), build_graph_state(ring(7))).exact


def test_r7_literal_transcription_reconstructs_line_part_only():
    literal = r7_explicit_cpd(corrected=False)
    assert not verify(literal, build_graph_state(ring(7))).exact
    head = CPDecomposition(7, literal.terms[:8])
    assert verify(head, build_graph_state(line(7))).exact


def test_verify_reports_residual_on_mismatch():
    D = line_cpd(4)
    t = D.terms[0]
    bad = CPDecomposition(4, (Term(t.weight * ExactAmplitude(2), t.factors),) + D.terms[1:])
    res = verify(bad, build_graph_state(line(4)))
    assert not res.exact and res.residual == pytest.approx(0.5)
    assert verify(line_cpd(6), build_graph_state(line(6))).exact


def test_zero_factor_rejected():
    with pytest.raises(InputError):
        CPDecomposition(1, (Term(ONE, (ExactVector([0, 0]),)),))


def test_json_round_trip():
    for D in (ring_cpd(5), r3_two_term_cpd()):
        back = cpd_from_json(cpd_to_json(D))
        assert canonical_terms(back) == canonical_terms(D)
    with pytest.raises(InputError):
        cpd_from_json({"n": 1})


def test_float_factors_rebuild_state():
    D = ring_cpd(5)
    mats = cpd_to_factors(D)
    total = sum(kron_list([A[:, r] for A in mats]) for r in range(len(D)))
    assert np.allclose(total, dense_graph_state(5, ring(5).edges()))


@pytest.mark.parametrize(
    "G, lower, upper",
    [(ring(5), 5, 6), (ring(7), 9, 12), (ring(6), 8, 8), (ring(4), 4, 4), (star(5), 2, 2), (line(5), 4, 4)],
)
def test_rank_bounds_examples(G, lower, upper):
    b = rank_bounds(G)
    assert (b.lower, b.upper) == (lower, upper)


def test_triangle_bounds_follow_two_term_witness():
    b = rank_bounds(ring(3))
    assert (b.lower, b.upper) == (2, 2)
    assert b.lower <= len(r3_two_term_cpd())


@pytest.mark.parametrize("G", [complete(4), star(6), line(6), ring(8)])
def test_rank_bounds_sane(G):
    b = rank_bounds(G)
    assert b.lower <= b.upper
    psi = build_graph_state(G)
    assert b.lower == max(2 ** cut_rank(G, A) for A in all_cuts(G.n))


def test_bounds_do_not_exceed_constructions():
    for m in (5, 7, 9):
        assert rank_bounds(ring(m)).upper <= len(ring_cpd(m))
    for n in (4, 6, 8):
        assert rank_bounds(line(n)).lower <= len(line_cpd(n))


def test_support_membership_examples():
    A = Bipartition.from_vertices(4, [0, 2])
    assert all(support_membership(line_cpd(4), A, build_graph_state(line(4))))
    psi = ket("+0-1")
    assert support_membership(from_labels([(ONE, "+0-1")]), Bipartition.from_vertices(4, [1]), psi) == [True]


def test_ring5_terms_span_the_support():
    A = Bipartition.from_vertices(5, [1, 3])
    psi = build_graph_state(ring(5))
    assert span_contains_support(ring_cpd(5), A, psi)
    # six terms against a rank-4 support: the terms themselves need not lie inside
    assert not all(support_membership(ring_cpd(5), A, psi))


@pytest.mark.parametrize("n", [4, 6, 8])
def test_terms_in_support_when_count_equals_rank(n):
    D = line_cpd(n)
    psi = build_graph_state(line(n))
    for A in all_cuts(n):
        if 2 ** cut_rank(line(n), A) == len(D):
            assert all(support_membership(D, A, psi))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_lower_bound_structure(n):
    rep = verify_lower_bound_structure(n, trials=200)
    assert rep.passed
    assert rep.num_states == 2 ** n


def test_lower_bound_structure_range():
    with pytest.raises(InputError):
        verify_lower_bound_structure(5)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2 ** 10 - 1))
def test_random_product_terms_round_trip(n, code):
    labels = "".join("+-01rl"[(code >> (2 * i)) % 6] for i in range(n))
    D = from_labels([(ONE, labels)])
    assert reconstruct(D) == product_state(list(labels))
