"""Longest-path alignment and segmentation of two difference sequences.

The graph has a start vertex, 2N - 1 alignment vertices ``Align(j1, j2)``
(one coordinate zero), segmentation vertices ``Seg(j1, j2, s)`` and a
terminal vertex.  The tag ``s`` records which sequence is one sample ahead
of the other since the alignment vertex: 0 for neither, 1 for the first,
2 for the second.  Every incoming edge of ``Seg(j1, j2, .)`` carries the
weight W(d1[j1], d2[j2]); all other edges weigh zero.

Among paths of maximum total weight, paths that pass through fewer
zero-weight segmentation vertices are preferred.  Zero-weight vertices add
nothing and would otherwise produce spurious ties.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .segmentation import Segmentation, count_constraint_violation

START = "start"
TERMINAL = "terminal"
WEIGHT_KINDS = ("w1", "w2", "w3")

_NEG = (float("-inf"), float("-inf"))


class Align(NamedTuple):
    j1: int
    j2: int


class Seg(NamedTuple):
    j1: int
    j2: int
    s: int


def vertex_key(u):
    if u == START:
        return (0,)
    if u == TERMINAL:
        return (3,)
    if isinstance(u, Align):
        return (1, u.j1, u.j2)
    return (2, u.j1, u.j2, u.s)


def edge_weight(kind: str, a, b, v):
    """W1 (indicator), W2 (product) or W3 (smaller square) of a gated pair.

    The gate requires a*b > 0 and |a|, |b| >= v.
    """
    if not v > 0:
        raise ValueError("threshold must be positive")
    kind = kind.lower()
    if kind not in WEIGHT_KINDS:
        raise ValueError(f"unknown weight kind {kind!r}")
    if not (a * b > 0 and abs(a) >= v and abs(b) >= v):
        return 0
    if kind == "w1":
        return 1
    if kind == "w2":
        return a * b
    return min(a * a, b * b)


def alignment_vertices(N: int) -> list[Align]:
    return [Align(0, j) for j in range(N)] + [Align(j, 0) for j in range(1, N)]


def segmentation_vertices(N: int) -> list[Seg]:
    out = []
    for j1 in range(1, N + 1):
        for j2 in range(1, N + 1):
            tags = (0,) if j1 == 1 or j2 == 1 else (0, 1, 2)
            out.extend(Seg(j1, j2, s) for s in tags)
    return out


def successors(u, N: int) -> list:
    """Adjacency of the alignment graph, in vertex order."""
    if u == START:
        return alignment_vertices(N)
    if u == TERMINAL:
        return []
    j1, j2 = u.j1, u.j2
    if isinstance(u, Align):
        return [Seg(j1 + k, j2 + k, 0) for k in range(1, N - max(j1, j2) + 1)]
    s = u.s
    out = [TERMINAL]
    out += [Seg(j1 + k, j2 + k, s) for k in range(1, N - max(j1, j2) + 1)]
    if s in (0, 2):
        out += [Seg(j1 + k + 1, j2 + k, 1 if s == 0 else 0) for k in range(1, N - max(j1 + 1, j2) + 1)]
    if s in (0, 1):
        out += [Seg(j1 + k, j2 + k + 1, 2 if s == 0 else 0) for k in range(1, N - max(j1, j2 + 1) + 1)]
    return sorted(out, key=vertex_key)


@dataclass(frozen=True)
class AlignmentGraph:
    d1: tuple
    d2: tuple
    v: float
    kind: str = "w1"

    @property
    def N(self) -> int:
        return len(self.d1)

    def alignment_vertices(self) -> list[Align]:
        return alignment_vertices(self.N)

    def segmentation_vertices(self) -> list[Seg]:
        return segmentation_vertices(self.N)

    def vertices(self) -> list:
        return [START, *self.alignment_vertices(), *self.segmentation_vertices(), TERMINAL]

    def successors(self, u) -> list:
        return successors(u, self.N)

    def pair_weight(self, j1: int, j2: int):
        return edge_weight(self.kind, self.d1[j1 - 1], self.d2[j2 - 1], self.v)

    def weight_into(self, u):
        return self.pair_weight(u.j1, u.j2) if isinstance(u, Seg) else 0

    def edges(self) -> Iterator[tuple]:
        for u in self.vertices():
            for w in self.successors(u):
                yield u, w, self.weight_into(w)


def build_graph(d1, d2, v, kind: str = "w1") -> AlignmentGraph:
    a = tuple(getattr(d1, "values", d1))
    b = tuple(getattr(d2, "values", d2))
    if len(a) != len(b):
        raise ValueError(f"difference sequences differ in length ({len(a)} vs {len(b)})")
    if len(a) < 2:
        raise ValueError("need at least two samples per sequence")
    if not v > 0:
        raise ValueError("threshold must be positive")
    if kind.lower() not in WEIGHT_KINDS:
        raise ValueError(f"unknown weight kind {kind!r}")
    return AlignmentGraph(a, b, v, kind.lower())


@dataclass(frozen=True)
class PathResult:
    weight: object
    paths: tuple
    truncated: bool
    count: int
    zero_weight_vertices: int = 0


def _merge(x, y):
    # (value, count) pairs: keep the larger value, add counts on ties.
    if x[0] > y[0]:
        return x
    if y[0] > x[0]:
        return y
    return (x[0], x[1] + y[1])


def _plus(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _solve(graph: AlignmentGraph):
    """Best (weight, -zero_vertices) from each vertex to the terminal, with path counts."""
    N = graph.N
    gain_in = {}
    for j1 in range(1, N + 1):
        for j2 in range(1, N + 1):
            w = graph.pair_weight(j1, j2)
            gain_in[j1, j2] = (w, -1 if w == 0 else 0)
    empty = (_NEG, 0)
    # diag[s][(a, b)] = best gain over Seg(a+k, b+k, s), k >= 1
    diag = [dict(), dict(), dict()]

    def D(s, a, b):
        return diag[s].get((a, b), empty)

    best = {}
    for total in range(2 * N, 1, -1):
        for j1 in range(max(1, total - N), min(N, total - 1) + 1):
            j2 = total - j1
            tags = (0,) if j1 == 1 or j2 == 1 else (0, 1, 2)
            for s in tags:
                options = [((0, 0), 1), D(s, j1, j2)]
                if s == 0:
                    options += [D(1, j1 + 1, j2), D(2, j1, j2 + 1)]
                elif s == 1:
                    options.append(D(0, j1, j2 + 1))
                else:
                    options.append(D(0, j1 + 1, j2))
                acc = empty
                for o in options:
                    acc = _merge(acc, o)
                best[Seg(j1, j2, s)] = acc
            for s in (0, 1, 2):
                here = best.get(Seg(j1, j2, s))
                cand = D(s, j1, j2)
                if here is not None:
                    cand = _merge((_plus(gain_in[j1, j2], here[0]), here[1]), cand)
                if cand is not empty:
                    diag[s][j1 - 1, j2 - 1] = cand
    acc = empty
    for al in alignment_vertices(N):
        best[al] = D(0, al.j1, al.j2)
        acc = _merge(acc, best[al])
    best[START] = acc
    best[TERMINAL] = ((0, 0), 1)
    return best, gain_in


def longest_paths(graph: AlignmentGraph, cap: int = 64) -> PathResult:
    """All maximum-weight start-to-terminal paths, up to ``cap`` of them."""
    if cap < 1:
        raise ValueError("cap must be positive")
    best, gain_in = _solve(graph)
    target, total = best[START]
    paths = []

    def gain(u):
        inc = gain_in[u.j1, u.j2] if isinstance(u, Seg) else (0, 0)
        return _plus(inc, best[u][0])

    def walk(u, prefix):
        if len(paths) >= cap:
            return
        if u == TERMINAL:
            paths.append(tuple(prefix))
            return
        need = best[u][0]
        for w in graph.successors(u):
            if w in best and gain(w) == need:
                walk(w, prefix + [w])
                if len(paths) >= cap:
                    return

    walk(START, [START])
    return PathResult(target[0], tuple(paths), total > len(paths), total, -target[1])


def path_weight(graph: AlignmentGraph, path) -> object:
    return sum((graph.weight_into(u) for u in path), 0)


@dataclass(frozen=True)
class PathSegmentation:
    align: Align
    seg1: Segmentation
    seg2: Segmentation

    @property
    def offset(self) -> int:
        """Positions by which the second sequence lags the first."""
        return self.align.j2 - self.align.j1

    @property
    def m(self) -> int:
        return self.seg1.m

    @property
    def valid(self) -> bool:
        return self.m >= 1


def path_to_segmentation(path) -> PathSegmentation:
    aligns = [u for u in path if isinstance(u, Align)]
    segs = [u for u in path if isinstance(u, Seg)]
    if not segs:
        raise ValueError("path has no segmentation vertex")
    if len(aligns) != 1:
        raise ValueError("path must contain exactly one alignment vertex")
    ps = PathSegmentation(
        aligns[0],
        Segmentation(tuple(u.j1 for u in segs)),
        Segmentation(tuple(u.j2 for u in segs)),
    )
    violation = count_constraint_violation(ps.seg1.region_counts, ps.seg2.region_counts)
    if violation:
        raise AssertionError(f"path breaks the count constraints: {violation[1]}")
    return ps


def _label(u) -> str:
    if u in (START, TERMINAL):
        return u
    if isinstance(u, Align):
        return f"a_{u.j1}_{u.j2}"
    return f"s_{u.j1}_{u.j2}_{u.s}"


def to_dot(graph: AlignmentGraph, paths=()) -> str:
    """Graphviz rendering; edges on ``paths`` are drawn in red."""
    hot = {(p[k], p[k + 1]) for p in paths for k in range(len(p) - 1)}
    lines = ["digraph alignment {", "  rankdir=LR;"]
    for u in graph.vertices():
        text = u if isinstance(u, str) else str(tuple(u))
        lines.append(f'  {_label(u)} [label="{text}"];')
    for u, w, weight in graph.edges():
        attrs = [f'label="{float(weight):g}"']
        if (u, w) in hot:
            attrs.append("color=red penwidth=2")
        lines.append(f"  {_label(u)} -> {_label(w)} [{' '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
