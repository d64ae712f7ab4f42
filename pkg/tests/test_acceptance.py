"""Acceptance suite: one PASS/FAIL line per criterion, at the stated tolerances
and time budgets."""

from __future__ import annotations

import time

import numpy as np
import pytest

from graphrank.als import AlsConfig, als_fit
from graphrank.cpd import (
    r7_explicit_cpd,
    cpd_to_factors,
    line_cpd,
    r3_three_term_cpd,
    rank_bounds,
    ring_cpd,
    same_terms,
    verify,
    verify_lower_bound_structure,
)
from graphrank.graph import (
    Bipartition,
    Graph,
    all_adjacency_rows,
    all_graphs,
    batch_cut_ranks,
    batch_is_connected,
    cut_rank,
    line,
    ring,
)
from graphrank.measures import (
    batch_dense_gme,
    batch_min_cut_rank,
    count_odd_degree_graphs,
    gme_closed_form,
    gme_dense,
    graph_to_tableau,
    n_tangle_dense,
    n_tangle_graph_rule,
    n_tangle_stabilizer,
    values_from_cut_rank,
)
from graphrank.statevec import batch_graph_states, build_graph_state, reduced_density

pytestmark = pytest.mark.slow


def report(capsys, number, title, ok, detail, elapsed, budget):
    within = elapsed < budget
    verdict = "PASS" if ok and within else "FAIL"
    with capsys.disabled():
        print(f"\n[criterion {number}] {verdict}  {title}: {detail}; {elapsed:.4f}s (budget {budget}s)")
    assert ok, detail
    assert within, f"took {elapsed:.3f}s, budget {budget}s"


def test_criterion_1_r3_exactness(capsys):
    target = build_graph_state(ring(3))
    D = r3_three_term_cpd()
    times = []
    for _ in range(5):
        t = time.perf_counter()
        res = verify(D, target)
        times.append(time.perf_counter() - t)
    report(capsys, 1, "three-term triangle expression", res.exact and len(D) == 3,
           f"exact={res.exact}, terms={len(D)}", min(times), 1e-3)


def test_criterion_2_line_generator(capsys):
    t = time.perf_counter()
    bad = []
    for n in range(2, 13):
        D = line_cpd(n)
        if len(D) != 2 ** (n // 2) or not verify(D, build_graph_state(line(n))).exact:
            bad.append(n)
    report(capsys, 2, "line decompositions n=2..12", not bad, f"failures {bad}", time.perf_counter() - t, 1.0)


def test_criterion_3_ring_generator(capsys):
    t = time.perf_counter()
    bad = []
    for m, count in zip((3, 5, 7, 9, 11), (3, 6, 12, 24, 48)):
        D = ring_cpd(m)
        if len(D) != count or not verify(D, build_graph_state(ring(m))).exact:
            bad.append(m)
    listed = same_terms(ring_cpd(7), r7_explicit_cpd())
    report(capsys, 3, "odd-ring decompositions m=3..11", not bad and listed,
           f"failures {bad}, 7-qubit expression matches={listed}", time.perf_counter() - t, 5.0)


def test_criterion_4_rank_bounds(capsys):
    t = time.perf_counter()
    mismatches = []
    for n in range(1, 5):
        b = rank_bounds(ring(2 * n + 1))
        want = (2 ** n + 1, 3 * 2 ** (n - 1))
        if (b.lower, b.upper) != want:
            mismatches.append(f"ring({2 * n + 1}) gave {(b.lower, b.upper)} expected {want}")
    for n in range(2, 6):
        b = rank_bounds(ring(2 * n))
        if (b.lower, b.upper) != (2 ** n, 2 ** n):
            mismatches.append(f"ring({2 * n}) gave {(b.lower, b.upper)} expected {(2 ** n, 2 ** n)}")
    detail = "; ".join(mismatches) if mismatches else "all bounds as expected"
    report(capsys, 4, "odd and even ring bounds", not mismatches, detail, time.perf_counter() - t, 10.0)


def _all_subsets(n):
    for mask in range(1, (1 << n) - 1):
        yield Bipartition(n, mask)


def test_criterion_5_reduced_rank_law(capsys):
    t = time.perf_counter()
    worst_flat = 0.0
    rank_failures = 0
    checked = 0
    for n in range(2, 7):
        rows = all_adjacency_rows(n)
        states = batch_graph_states(rows)
        for A in _all_subsets(n):
            d = batch_cut_ranks(rows, A)
            keep = A.complement_vertices
            perm = [0] + [1 + q for q in keep + A.vertices]
            M = states.reshape((-1,) + (2,) * n).transpose(perm).reshape(len(rows), 1 << len(keep), 1 << len(A))
            rho = M @ M.transpose(0, 2, 1)
            ev = np.linalg.eigvalsh(rho)
            nonzero = ev > 1e-10
            rank_failures += int(np.sum(nonzero.sum(axis=1) != 2 ** d))
            flat = np.where(nonzero, np.abs(ev - (2.0 ** -d)[:, None]), 0.0)
            worst_flat = max(worst_flat, float(flat.max()))
            checked += len(rows)
    # the library path on every graph up to four vertices
    for n in range(2, 5):
        for G in all_graphs(n):
            psi = build_graph_state(G)
            for A in _all_subsets(n):
                if reduced_density(psi, A).rank() != 2 ** cut_rank(G, A):
                    rank_failures += 1
    ok = rank_failures == 0 and worst_flat < 1e-10
    report(capsys, 5, "reduced-state rank equals 2**cut rank with flat spectrum", ok,
           f"{checked} (graph, cut) pairs, rank failures {rank_failures}, max flatness error {worst_flat:.1e}",
           time.perf_counter() - t, 120.0)


def test_criterion_6_gme_dichotomy(capsys):
    t = time.perf_counter()
    problems = []
    closed_table = {}
    for n in range(2, 8):
        rows = all_adjacency_rows(n)
        dmin = batch_min_cut_rank(rows)
        conn = batch_is_connected(rows)
        if not np.array_equal(dmin == 1, conn) or not np.array_equal(dmin == 0, ~conn):
            problems.append(f"n={n}: dichotomy broken")
        closed_table[n] = (rows, dmin)
    # scalar closed form on every graph up to five vertices and a sample beyond
    rng = np.random.default_rng(6)
    for n in range(2, 8):
        rows, dmin = closed_table[n]
        picks = range(len(rows)) if n <= 5 else rng.choice(len(rows), 1500, replace=False)
        for i in picks:
            G = Graph(n, tuple(int(r) for r in rows[i]))
            want = (1.0, 0.5, 0.5) if dmin[i] == 1 else (0.0, 0.0, 0.0)
            if gme_closed_form(G).values() != want:
                problems.append(f"closed form differs on {G.edges()}")
    worst = 0.0
    for n in range(2, 7):
        rows, dmin = closed_table[n]
        dense = batch_dense_gme(batch_graph_states(rows))
        closed = np.array([values_from_cut_rank(int(d)) for d in dmin])
        worst = max(worst, float(np.abs(dense - closed).max()))
    for n in (3, 5, 6):
        rows, _ = closed_table[n]
        for i in rng.choice(len(rows), min(40, len(rows)), replace=False):
            G = Graph(n, tuple(int(r) for r in rows[i]))
            diff = np.abs(np.array(gme_dense(build_graph_state(G)).values()) - gme_closed_form(G).values()).max()
            worst = max(worst, float(diff))
    ok = not problems and worst < 1e-9
    report(capsys, 6, "connected iff (1, 0.5, 0.5), dense agrees", ok,
           f"issues {problems[:3]}, max dense deviation {worst:.1e}", time.perf_counter() - t, 300.0)


def _random_graph(n, rng):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5]
    return Graph.from_edges(n, edges)


def test_criterion_7_n_tangle(capsys):
    t = time.perf_counter()
    disagreements = 0
    total = 0
    rng = np.random.default_rng(7)
    graphs = [G for n in range(1, 7) for G in all_graphs(n)] + [_random_graph(8, rng) for _ in range(200)]
    for G in graphs:
        dense = n_tangle_dense(build_graph_state(G))
        rule = n_tangle_graph_rule(G)
        stab = n_tangle_stabilizer(graph_to_tableau(G))
        total += 1
        if not (dense == rule == stab):
            disagreements += 1
    counts = [count_odd_degree_graphs(n) for n in (2, 4, 6)]
    ok = disagreements == 0 and counts == [1, 8, 1024]
    report(capsys, 7, "three n-tangle methods and odd-degree census", ok,
           f"{total} graphs, disagreements {disagreements}, census {counts}", time.perf_counter() - t, 120.0)


def test_criterion_8_lower_bound_structure(capsys):
    t = time.perf_counter()
    summary = []
    ok = True
    for n in (2, 3, 4):
        rep = verify_lower_bound_structure(n, trials=1000, seed=n)
        ok &= rep.passed
        summary.append(f"n={n}: {rep.num_states} states, random entangled {rep.random_entangled}/1000")
    report(capsys, 8, "odd-ring support structure", ok, "; ".join(summary), time.perf_counter() - t, 60.0)


def test_criterion_9_als(capsys):
    t = time.perf_counter()
    parts = []
    ok = True
    for m, R in ((3, 3), (5, 6), (7, 12)):
        psi = build_graph_state(ring(m))
        res = als_fit(psi, AlsConfig(R, restarts=50, seed=m, stop_below=1e-6))
        ok &= res.best_residual < 1e-6
        parts.append(f"ring({m}) R={R} residual {res.best_residual:.1e} after {len(res.residuals)} restarts")
        warm = als_fit(psi, AlsConfig(R, restarts=1), init=cpd_to_factors(ring_cpd(m)))
        ok &= warm.best_residual < 1e-12 and warm.iterations == [0]
        parts.append(f"warm {warm.best_residual:.1e}")
    diagnostics = []
    for m in (3, 5, 7):
        R = 2 ** ((m - 1) // 2)
        res = als_fit(build_graph_state(ring(m)), AlsConfig(R, restarts=4, max_iters=1500, seed=m))
        diagnostics.append(f"ring({m}) R={R}: residual {res.best_residual:.2e}, "
                           f"max term norm {res.max_term_norm:.1e}, diverged {res.diverged}")
    with capsys.disabled():
        print("\n[criterion 9 diagnostics, not graded] " + "; ".join(diagnostics))
    report(capsys, 9, "alternating least squares evidence", ok, "; ".join(parts), time.perf_counter() - t, 600.0)
