"""Contraction graphs and their evaluation.

A vertex stands for the symmetric coefficient tensor of one homogeneous part
(its degree equals the number of edge endpoints on it); an edge sums one
shared index over ``1..n``.  Because every index is summed against exactly
two tensors, every fully contracted graph gives a scalar that is unchanged
when all polynomials are rotated by the same orthogonal matrix.

Graphs are written as text, one per line::

    3:p,3:p ; 0-1,0-1,0-1

listing ``degree:polynomial`` per vertex and then the edges by vertex
position.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import GraphSpecError
from .tensor_poly import Polynomial, multinomial_weight, quadratic_matrix

MAX_CANONICAL_VERTICES = 8
MAX_SLOTS = 24
MAX_EDGES = 12

Vertex = tuple[int, str]
Edge = tuple[int, int]


@dataclass(frozen=True)
class ContractionGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        vertices = tuple((int(d), str(pid)) for d, pid in self.vertices)
        edges = tuple(sorted((min(a, b), max(a, b)) for a, b in self.edges))
        if not vertices:
            raise GraphSpecError("graph has no vertices")
        for d, pid in vertices:
            if d < 0:
                raise GraphSpecError(f"negative vertex degree {d}")
            if not pid:
                raise GraphSpecError("empty polynomial id")
        slots = [0] * len(vertices)
        for a, b in edges:
            if not (0 <= a < len(vertices) and 0 <= b < len(vertices)):
                raise GraphSpecError(f"edge {a}-{b} refers to a missing vertex")
            slots[a] += 1
            slots[b] += 1
        for i, ((d, pid), used) in enumerate(zip(vertices, slots)):
            if used != d:
                raise GraphSpecError(f"vertex {i} ({d}:{pid}) has {used} edge endpoints, expected {d}")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.vertices)

    @property
    def poly_ids(self) -> tuple[str, ...]:
        return tuple(sorted({pid for _, pid in self.vertices}))

    def components(self) -> list[list[int]]:
        parent = list(range(len(self.vertices)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for a, b in self.edges:
            parent[find(a)] = find(b)
        groups: dict[int, list[int]] = {}
        for i in range(len(self.vertices)):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def to_spec(self) -> str:
        verts = ",".join(f"{d}:{pid}" for d, pid in self.vertices)
        edges = ",".join(f"{a}-{b}" for a, b in self.edges)
        return f"{verts} ; {edges}"

    def __str__(self):
        return self.to_spec()


def parse_vertices(text: str, line: int | None = None) -> tuple[Vertex, ...]:
    """Parse ``deg:poly,deg:poly,...``; a bare degree means polynomial ``p``."""
    vertices = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            raise GraphSpecError(f"empty vertex in {text!r}", line)
        deg, _, pid = token.partition(":")
        try:
            d = int(deg)
        except ValueError:
            raise GraphSpecError(f"bad vertex degree {deg!r}", line) from None
        if d < 0:
            raise GraphSpecError(f"negative vertex degree {d}", line)
        vertices.append((d, pid.strip() or "p"))
    return tuple(vertices)


def parse_graph(text: str, line: int | None = None) -> ContractionGraph:
    text = text.split("#", 1)[0]
    if ";" not in text:
        raise GraphSpecError(f"missing ';' between vertices and edges in {text.strip()!r}", line)
    vert_text, edge_text = text.split(";", 1)
    vertices = parse_vertices(vert_text, line)
    edges = []
    for token in edge_text.split(","):
        token = token.strip()
        if not token:
            continue
        a, sep, b = token.partition("-")
        try:
            if not sep:
                raise ValueError
            edges.append((int(a), int(b)))
        except ValueError:
            raise GraphSpecError(f"bad edge {token!r}", line) from None
    try:
        return ContractionGraph(vertices, tuple(edges))
    except GraphSpecError as exc:
        if exc.line is None and line is not None:
            raise GraphSpecError(str(exc), line) from None
        raise


def parse_graph_file(text: str) -> list[ContractionGraph]:
    """One graph per line; blank lines and ``#`` comments are skipped."""
    graphs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.split("#", 1)[0].strip():
            continue
        graphs.append(parse_graph(raw, lineno))
    return graphs


# -- evaluation ---------------------------------------------------------------

def _resolve(polys, pid: str) -> Polynomial:
    if isinstance(polys, Polynomial):
        return polys
    try:
        return polys[pid]
    except KeyError:
        raise GraphSpecError(f"no polynomial bound to id {pid!r}") from None


def _check_polys(g: ContractionGraph, polys) -> int:
    dims = {_resolve(polys, pid).n for pid in g.poly_ids}
    if len(dims) != 1:
        raise ValueError(f"polynomials in one graph must share a dimension, got {sorted(dims)}")
    return dims.pop()


def _trace_repeated(tensor: np.ndarray, labels: list[int]) -> tuple[np.ndarray, list[int]]:
    """Trace out every label that appears twice on one tensor (self-loops)."""
    while True:
        seen = {}
        for axis, lab in enumerate(labels):
            if lab in seen:
                a, b = seen[lab], axis
                tensor = np.trace(tensor, axis1=a, axis2=b)
                labels = [l for i, l in enumerate(labels) if i not in (a, b)]
                break
            seen[lab] = axis
        else:
            return tensor, labels


def evaluate_graph(g: ContractionGraph, polys: Polynomial | Mapping[str, Polynomial]) -> float:
    """Contract the graph's tensor network.

    ``polys`` is either one polynomial (bound to every id) or a mapping from
    polynomial id to polynomial.  Tensors are merged pairwise, always picking
    the pair whose merged tensor has the fewest remaining indices.
    """
    _check_polys(g, polys)
    cache: dict[tuple[str, int], np.ndarray] = {}
    incident: list[list[int]] = [[] for _ in g.vertices]
    for e, (a, b) in enumerate(g.edges):
        incident[a].append(e)
        incident[b].append(e)

    network = []
    for (d, pid), labels in zip(g.vertices, incident):
        key = (pid, d)
        if key not in cache:
            cache[key] = _resolve(polys, pid).part(d).symmetric_tensor()
        network.append(_trace_repeated(cache[key], labels))

    while True:
        best = None
        for i, j in itertools.combinations(range(len(network)), 2):
            shared = set(network[i][1]) & set(network[j][1])
            if not shared:
                continue
            order = len(network[i][1]) + len(network[j][1]) - 2 * len(shared)
            if best is None or order < best[0]:
                best = (order, i, j, shared)
        if best is None:
            break
        _, i, j, shared = best
        (ta, la), (tb, lb) = network[i], network[j]
        shared = sorted(shared)
        merged = np.tensordot(ta, tb, axes=([la.index(s) for s in shared], [lb.index(s) for s in shared]))
        labels = [l for l in la if l not in shared] + [l for l in lb if l not in shared]
        network = [t for k, t in enumerate(network) if k not in (i, j)]
        network.insert(i, (merged, labels))

    value = 1.0
    for tensor, labels in network:
        assert not labels
        value = value * float(tensor)
    return value


def _symmetric_entry(poly: Polynomial, idx: Sequence[int]) -> float:
    ell = [0] * poly.n
    for i in idx:
        ell[i] += 1
    ell = tuple(ell)
    return poly.part(len(idx)).coeff(ell) / multinomial_weight(ell)


def evaluate_graph_naive(g: ContractionGraph, polys: Polynomial | Mapping[str, Polynomial]) -> float:
    """Direct sum over all ``n**|edges|`` index assignments.

    Exponential cost; kept as an independent check of :func:`evaluate_graph`.
    """
    n = _check_polys(g, polys)
    incident: list[list[int]] = [[] for _ in g.vertices]
    for e, (a, b) in enumerate(g.edges):
        incident[a].append(e)
        incident[b].append(e)
    lookup: dict[tuple, float] = {}
    total = 0.0
    for assignment in itertools.product(range(n), repeat=len(g.edges)):
        term = 1.0
        for (_, pid), edges in zip(g.vertices, incident):
            idx = tuple(sorted(assignment[e] for e in edges))
            key = (pid, idx)
            if key not in lookup:
                lookup[key] = _symmetric_entry(_resolve(polys, pid), idx)
            term *= lookup[key]
        total += term
    return float(total)


# -- named constructions ------------------------------------------------------

def cycle_graph(m: int, pid: str = "p") -> ContractionGraph:
    """Ring of ``m`` degree-2 vertices; evaluates to ``Tr([p]^m)``."""
    if m < 1:
        raise ValueError("cycle length must be >= 1")
    return ContractionGraph(tuple((2, pid) for _ in range(m)), tuple((i, (i + 1) % m) for i in range(m)))


def pair_graph(d: int, pid: str = "p", qid: str | None = None) -> ContractionGraph:
    """Two degree-``d`` vertices joined by ``d`` parallel edges."""
    return ContractionGraph(((d, pid), (d, qid or pid)), tuple((0, 1) for _ in range(d)))


def chain_graph(m: int, pid: str = "p") -> ContractionGraph:
    """Degree-1 vertex, ``m`` degree-2 vertices, degree-1 vertex in a path:
    ``sum_ab p_a ([p]^m)_ab p_b``."""
    vertices = ((1, pid),) + tuple((2, pid) for _ in range(m)) + ((1, pid),)
    return ContractionGraph(vertices, tuple((i, i + 1) for i in range(m + 1)))


def inserted_pair_graph(d: int, k: int, pid: str = "p") -> ContractionGraph:
    """:func:`pair_graph` with ``k`` degree-2 vertices placed on one edge."""
    if k == 0:
        return pair_graph(d, pid)
    vertices = ((d, pid), (d, pid)) + tuple((2, pid) for _ in range(k))
    path = [0] + list(range(2, 2 + k)) + [1]
    edges = [(0, 1)] * (d - 1) + list(zip(path[:-1], path[1:]))
    return ContractionGraph(vertices, tuple(edges))


def trace_power(p: Polynomial, m: int) -> float:
    if m < 1:
        raise ValueError("trace power needs m >= 1")
    return float(np.trace(np.linalg.matrix_power(quadratic_matrix(p), m)))


# -- canonical forms ----------------------------------------------------------

@dataclass(frozen=True, order=True)
class CanonicalForm:
    vertex_labels: tuple[Vertex, ...]
    edge_code: tuple[Edge, ...]

    def graph(self) -> ContractionGraph:
        return ContractionGraph(self.vertex_labels, self.edge_code)

    def to_spec(self) -> str:
        return self.graph().to_spec()


def canonicalize(g: ContractionGraph) -> CanonicalForm:
    """Relabel vertices into sorted label order so that the edge-multiplicity
    matrix, read column by column over its upper triangle, is lexicographically
    smallest.

    Positions are filled one at a time and only partial labelings whose code
    prefix is still minimal survive, so symmetric graphs cost roughly their
    automorphism count instead of every permutation.
    """
    nv = len(g.vertices)
    if nv > MAX_CANONICAL_VERTICES:
        raise GraphSpecError(f"canonicalization is limited to {MAX_CANONICAL_VERTICES} vertices, got {nv}")
    mult = [[0] * nv for _ in range(nv)]
    for a, b in g.edges:
        mult[a][b] += 1
        if a != b:
            mult[b][a] += 1
    labels = tuple(sorted(g.vertices))
    frontier = [()]
    for pos in range(nv):
        best, survivors = None, []
        for assigned in frontier:
            for v in range(nv):
                if g.vertices[v] != labels[pos] or v in assigned:
                    continue
                column = tuple(mult[u][v] for u in assigned) + (mult[v][v],)
                if best is None or column < best:
                    best, survivors = column, [assigned + (v,)]
                elif column == best:
                    survivors.append(assigned + (v,))
        frontier = survivors
    position = {v: i for i, v in enumerate(frontier[0])}
    code = tuple(sorted(
        (min(position[a], position[b]), max(position[a], position[b])) for a, b in g.edges
    ))
    return CanonicalForm(labels, code)


def _multiplicity_matrices(degrees: Sequence[int]):
    """Yield symmetric edge-count matrices (loops on the diagonal count twice)
    whose row sums match ``degrees``."""
    nv = len(degrees)
    counts = [[0] * nv for _ in range(nv)]
    remaining = list(degrees)

    def distribute(i, j, left):
        # spread `left` endpoints of vertex i over partners j..nv-1
        if j == nv:
            if left == 0:
                yield from fill(i + 1)
            return
        top = min(left, remaining[j])
        for c in range(top, -1, -1):
            counts[i][j] = counts[j][i] = c
            remaining[j] -= c
            yield from distribute(i, j + 1, left - c)
            remaining[j] += c
        counts[i][j] = counts[j][i] = 0

    def fill(i):
        if i == nv:
            yield [row[:] for row in counts]
            return
        r = remaining[i]
        for loops in range(r // 2, -1, -1):
            counts[i][i] = loops
            remaining[i] = 0
            yield from distribute(i, i + 1, r - 2 * loops)
            remaining[i] = r
        counts[i][i] = 0

    yield from fill(0)


def enumerate_graphs(
    spec: Sequence[Vertex] | str, max_vertices: int = MAX_CANONICAL_VERTICES, connected: bool = True
) -> list[ContractionGraph]:
    """All fully contracted multigraphs on exactly the vertices in ``spec``,
    up to isomorphism, sorted by canonical form."""
    if isinstance(spec, str):
        spec = parse_vertices(spec)
    spec = tuple(sorted((int(d), str(pid)) for d, pid in spec))
    if not spec:
        raise GraphSpecError("empty vertex specification")
    if len(spec) > max_vertices or len(spec) > MAX_CANONICAL_VERTICES:
        raise GraphSpecError(f"{len(spec)} vertices exceed the limit of {min(max_vertices, MAX_CANONICAL_VERTICES)}")
    degrees = [d for d, _ in spec]
    if any(d < 1 for d in degrees):
        raise GraphSpecError("vertex degrees must be >= 1")
    slots = sum(degrees)
    if slots % 2:
        raise GraphSpecError(f"total degree {slots} is odd; no full contraction exists")
    if slots > MAX_SLOTS:
        raise GraphSpecError(f"total degree {slots} exceeds the limit of {MAX_SLOTS}")

    forms = set()
    for counts in _multiplicity_matrices(degrees):
        edges = []
        for i in range(len(spec)):
            for j in range(i, len(spec)):
                edges.extend([(i, j)] * counts[i][j])
        g = ContractionGraph(spec, tuple(edges))
        if connected and not g.is_connected():
            continue
        forms.add(canonicalize(g))
    return [form.graph() for form in sorted(forms)]
