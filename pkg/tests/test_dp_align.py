from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stepreg import worked_example as wx
from stepreg.difference import difference_sequence
from stepreg.dp_align import (
    START,
    TERMINAL,
    Align,
    Seg,
    alignment_vertices,
    build_graph,
    edge_weight,
    longest_paths,
    path_to_segmentation,
    path_weight,
    segmentation_vertices,
    successors,
    to_dot,
)

from conftest import low_noise_instances, margin, observed_diffs

OPTIMAL = (START, Align(0, 0), Seg(2, 2, 0), Seg(4, 3, 1), Seg(5, 5, 0), Seg(7, 6, 1), Seg(8, 7, 1), TERMINAL)


def reference_successors(u, N):
    """Adjacency written out case by case, independent of the library."""
    if u == START:
        return {Align(0, j) for j in range(N)} | {Align(j, 0) for j in range(1, N)}
    if u == TERMINAL:
        return set()
    out = set()
    j1, j2 = u.j1, u.j2
    if isinstance(u, Align):
        for k in range(1, N + 1):
            if j1 + k <= N and j2 + k <= N:
                out.add(Seg(j1 + k, j2 + k, 0))
        return out
    out.add(TERMINAL)
    for k in range(1, N + 1):
        if j1 + k <= N and j2 + k <= N:
            out.add(Seg(j1 + k, j2 + k, u.s))
        if u.s in (0, 2) and j1 + k + 1 <= N and j2 + k <= N:
            out.add(Seg(j1 + k + 1, j2 + k, 1 if u.s == 0 else 0))
        if u.s in (0, 1) and j1 + k <= N and j2 + k + 1 <= N:
            out.add(Seg(j1 + k, j2 + k + 1, 2 if u.s == 0 else 0))
    return out


def all_paths(N):
    out = []

    def walk(u, path):
        if u == TERMINAL:
            out.append(tuple(path))
            return
        for w in successors(u, N):
            walk(w, path + [w])

    walk(START, [START])
    return out


def zero_vertices(graph, path):
    return sum(1 for u in path if isinstance(u, Seg) and graph.weight_into(u) == 0)


class TestEdgeWeight:
    def test_examples(self):
        assert edge_weight("w1", 1.3, 1.0, 1) == 1
        assert edge_weight("W2", -1.4, -1.4, 1) == pytest.approx(1.96)
        assert edge_weight("w3", 2, 1, 1) == 1
        for kind in ("w1", "w2", "w3"):
            assert edge_weight(kind, 0.5, 2, 1) == 0
            assert edge_weight(kind, -2, 2, 1) == 0

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            edge_weight("w4", 1, 1, 1)
        with pytest.raises(ValueError):
            edge_weight("w1", 1, 1, 0)

    @given(st.floats(0.001, 1e3), st.floats(0.001, 1e3), st.booleans())
    def test_w3_never_exceeds_w2(self, a, b, negative):
        if negative:
            a, b = -a, -b
        w2, w3 = edge_weight("w2", a, b, 1e-9), edge_weight("w3", a, b, 1e-9)
        assert w3 <= w2
        if a == b:
            assert w3 == w2


class TestStructure:
    @pytest.mark.parametrize("N", range(2, 51))
    def test_vertex_counts(self, N):
        assert len(alignment_vertices(N)) == 2 * N - 1
        segs = segmentation_vertices(N)
        assert len(segs) == len(set(segs)) == 3 * N * N - 4 * N + 2

    def test_example_sizes(self):
        assert (len(alignment_vertices(9)), len(segmentation_vertices(9))) == (17, 209)
        assert (len(alignment_vertices(2)), len(segmentation_vertices(2))) == (3, 6)

    @pytest.mark.parametrize("N", range(2, 8))
    def test_adjacency_matches_reference(self, N):
        for u in [START, *alignment_vertices(N), *segmentation_vertices(N), TERMINAL]:
            got = successors(u, N)
            assert len(got) == len(set(got))
            assert set(got) == reference_successors(u, N)

    def test_known_edge(self):
        assert Seg(4, 3, 1) in successors(Seg(2, 2, 0), 9)

    @pytest.mark.parametrize("N", range(2, 8))
    def test_edges_increase_index_sum_and_carry_pair_weight(self, N):
        rng = np.random.default_rng(N)
        g = build_graph(rng.normal(size=N), rng.normal(size=N), 0.3, "w2")
        for u, w, weight in g.edges():
            if u == START or w == TERMINAL:
                if w == TERMINAL or isinstance(w, Align):
                    assert weight == 0
                continue
            assert w.j1 + w.j2 > u.j1 + u.j2
            assert weight == g.pair_weight(w.j1, w.j2)

    @pytest.mark.parametrize("N", range(2, 7))
    def test_s_state_law(self, N):
        offset = {0: 0, 1: 1, 2: -1}
        for path in all_paths(N):
            align = path[1]
            for u in path[2:-1]:
                assert (u.j1 - align.j1) - (u.j2 - align.j2) == offset[u.s]

    def test_build_errors(self):
        with pytest.raises(ValueError):
            build_graph([1, 2], [1], 1)
        with pytest.raises(ValueError):
            build_graph([1], [1], 1)
        with pytest.raises(ValueError):
            build_graph([1, 2], [1, 2], 1, "w9")


class TestLongestPaths:
    @pytest.mark.parametrize("x", [Fraction(0), Fraction(1, 5), Fraction(49, 100)])
    def test_unique_optimal_path(self, x):
        g = build_graph(*observed_diffs(x), 1)
        res = longest_paths(g)
        assert (res.weight, res.count, res.truncated) == (5, 1, False)
        assert res.paths == (OPTIMAL,)

    def test_two_paths_at_half(self):
        g = build_graph(*observed_diffs(Fraction(1, 2)), Fraction(3, 4))
        res = longest_paths(g)
        assert (res.weight, res.count) == (6, 2)
        assert {Seg(6, 6, 0), Seg(7, 6, 1)} == {p[-3] for p in res.paths}
        segs = {(ps.seg1.boundaries, ps.seg2.boundaries) for ps in map(path_to_segmentation, res.paths)}
        assert segs == {((2, 3, 4, 5, 6, 8), (2, 3, 4, 5, 6, 7)), ((2, 3, 4, 5, 7, 8), (2, 3, 4, 5, 6, 7))}
        assert all(path_to_segmentation(p).m == 5 for p in res.paths)

    def test_cap_truncates(self):
        g = build_graph(*observed_diffs(Fraction(1, 2)), Fraction(3, 4))
        res = longest_paths(g, cap=1)
        assert len(res.paths) == 1 and res.truncated and res.count == 2
        with pytest.raises(ValueError):
            longest_paths(g, cap=0)

    def test_all_zero(self):
        res = longest_paths(build_graph([0] * 5, [0] * 5, 1))
        assert res.weight == 0

    @pytest.mark.parametrize("kind", ["w1", "w2", "w3"])
    def test_matches_brute_force(self, kind):
        rng = np.random.default_rng(17)
        for N in (2, 3, 4, 5):
            paths = all_paths(N)
            for _ in range(15):
                d1 = [int(v) for v in rng.integers(-2, 3, size=N)]
                d2 = [int(v) for v in rng.integers(-2, 3, size=N)]
                g = build_graph(d1, d2, 1, kind)
                scored = [((path_weight(g, p), -zero_vertices(g, p)), p) for p in paths]
                best = max(s for s, _ in scored)
                winners = sorted(p for s, p in scored if s == best)
                res = longest_paths(g, cap=10**6)
                assert res.weight == best[0]
                assert res.zero_weight_vertices == -best[1]
                assert res.count == len(winners)
                assert sorted(res.paths) == winners
                assert all(path_weight(g, p) == res.weight for p in res.paths)


class TestPathToSegmentation:
    def test_optimal_path(self):
        ps = path_to_segmentation(OPTIMAL)
        assert (ps.seg1.boundaries, ps.seg2.boundaries) == wx.TRUE_BOUNDARIES
        assert (ps.m, ps.offset, ps.valid) == (4, 0, True)

    def test_single_boundary(self):
        ps = path_to_segmentation((START, Align(0, 0), Seg(2, 2, 0), TERMINAL))
        assert ps.m == 0 and not ps.valid

    def test_no_seg_vertex(self):
        with pytest.raises(ValueError):
            path_to_segmentation((START, Align(0, 1), TERMINAL))


def test_dot_highlights_paths():
    g = build_graph(*observed_diffs(Fraction(0)), 1)
    dot = to_dot(g, [OPTIMAL])
    assert dot.startswith("digraph")
    assert dot.count("color=red") == len(OPTIMAL) - 1


def test_recovery_under_margin():
    # With v inside the noise margin the unique best W1 path has weight m + 1
    # and marks exactly the true boundaries.
    for inst, noisy in low_noise_instances(1000, seed=505):
        clean = [difference_sequence(c) for c in inst.clean]
        d1, d2 = (difference_sequence(y) for y in noisy)
        low, high = margin(clean, (d1, d2))
        res = longest_paths(build_graph(d1, d2, (low + high) / 2))
        assert (res.weight, res.count) == (inst.f.m + 1, 1)
        ps = path_to_segmentation(res.paths[0])
        assert (ps.seg1.boundaries, ps.seg2.boundaries) == tuple(s.boundaries for s in inst.truth)


def test_ties_are_counted_exactly():
    # Two identical single-jump sequences give one path per start alignment.
    d = [0, 2, 0, -2]
    res = longest_paths(build_graph(d, d, 1))
    assert res.weight == 2
    assert all(len(p) == 5 for p in res.paths)
