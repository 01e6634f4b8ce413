"""Named invariant families and feature vectors.

Catalog order is fixed: constant term, squared norm of the linear part, trace
powers, the two-vertex contraction of every part of degree >= 3, then mixed
invariants sorted by (number of inserted degree-2 vertices, base graph), then
any extra graphs sorted by canonical form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .contraction import (
    ContractionGraph,
    canonicalize,
    evaluate_graph,
    parse_graph,
    trace_power,
)
from .errors import DegenerateSpectrumError, InconsistentFeaturesError, InputError
from .tensor_poly import (
    HomogeneousPart,
    Polynomial,
    frobenius_dot,
    linear_vector,
    quadratic_matrix,
)

SPECTRAL_GAP_TOL = 1e-6
NEGATIVE_SQUARE_TOL = 1e-8


@dataclass(frozen=True)
class CatalogConfig:
    """Which invariants to emit.

    ``max_trace_power`` and ``mixed_powers`` default to ``n`` and ``0..n-1``
    once the dimension is known.  ``insertions`` adds, for every part of
    degree >= 3, the pair contraction with ``1..insertions`` degree-2
    vertices placed on one edge.
    """

    max_trace_power: int | None = None
    include_mixed: bool = False
    mixed_powers: tuple[int, ...] | None = None
    insertions: int = 0
    extra_graphs: tuple[ContractionGraph | str, ...] = ()
    normalize_by_order: bool = False

    def resolved_powers(self, n: int) -> tuple[int, ...]:
        powers = tuple(range(n)) if self.mixed_powers is None else tuple(sorted(set(self.mixed_powers)))
        bad = [m for m in powers if not 0 <= m <= n - 1]
        if bad:
            raise ValueError(f"mixed powers must lie in 0..{n - 1}, got {bad}")
        return powers

    def resolved_graphs(self) -> tuple[ContractionGraph, ...]:
        graphs = [parse_graph(g) if isinstance(g, str) else g for g in self.extra_graphs]
        return tuple(sorted(graphs, key=canonicalize))

    def to_dict(self) -> dict:
        return {
            "max_trace_power": self.max_trace_power,
            "include_mixed": self.include_mixed,
            "mixed_powers": None if self.mixed_powers is None else list(self.mixed_powers),
            "insertions": self.insertions,
            "extra_graphs": [g if isinstance(g, str) else g.to_spec() for g in self.extra_graphs],
            "normalize_by_order": self.normalize_by_order,
        }


@dataclass(frozen=True, eq=False)
class FeatureVector:
    names: tuple[str, ...]
    values: np.ndarray
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        names = tuple(self.names)
        values = np.array(self.values, dtype=float).reshape(-1)
        values.setflags(write=False)
        if len(names) != values.size:
            raise ValueError(f"{len(names)} names for {values.size} values")
        if len(set(names)) != len(names):
            raise ValueError("feature names must be unique")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "meta", dict(self.meta))

    def __len__(self):
        return len(self.names)

    def __getitem__(self, name: str) -> float:
        try:
            return float(self.values[self.names.index(name)])
        except ValueError:
            raise KeyError(name) from None

    def __contains__(self, name):
        return name in self.names

    def items(self):
        return zip(self.names, self.values.tolist())

    def concat(self, other: FeatureVector) -> FeatureVector:
        return FeatureVector(self.names + other.names, np.concatenate([self.values, other.values]), self.meta)

    def to_dict(self) -> dict:
        return {
            "meta": dict(self.meta),
            "features": [{"name": k, "value": v} for k, v in self.items()],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> FeatureVector:
        try:
            feats = data["features"]
            return cls(
                tuple(str(f["name"]) for f in feats),
                [float(f["value"]) for f in feats],
                data.get("meta", {}),
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed feature JSON: {exc!r}") from None


# entries are (name, value, number of vertices in the underlying graph)
Entry = tuple[str, float, int]


def _meta(p: Polynomial, normalization=None) -> dict:
    return {"n": p.n, "D": p.max_degree, "normalization": dict(normalization or {})}


def _pack(p: Polynomial, entries: Sequence[Entry], normalization=None) -> FeatureVector:
    return FeatureVector(tuple(e[0] for e in entries), [e[1] for e in entries], _meta(p, normalization))


def _pair_value(part: HomogeneousPart) -> float:
    # full contraction of p_i with itself, sum_l P_l^2 / N_l
    return float(np.sum(part.coeffs**2 / part.weights))


def _base_entries(p: Polynomial, max_trace_power: int | None) -> list[Entry]:
    m_top = p.n if max_trace_power is None else max_trace_power
    p1 = linear_vector(p)
    entries = [("const", float(p.part(0).coeffs[0]), 1), ("linear", float(p1 @ p1), 2)]
    entries += [(f"trace^{m}", trace_power(p, m), m) for m in range(1, m_top + 1)]
    entries += [(f"pair{d}", _pair_value(p.part(d)), 2) for d in range(3, p.max_degree + 1)]
    return entries


def _inserted_pair_value(part: HomogeneousPart, qk: np.ndarray) -> float:
    t = part.symmetric_tensor().reshape(part.n, -1)
    return float(np.sum((qk @ t) * t))


def _mixed_entries(p: Polynomial, powers: Sequence[int], insertions: int) -> list[Entry]:
    p1 = linear_vector(p)
    q = quadratic_matrix(p)
    top = max([0, insertions, *powers])
    qk = [np.eye(p.n)]
    for _ in range(top):
        qk.append(q @ qk[-1])
    entries = []
    for k in range(top + 1):
        if k in powers:
            # p1 @ p1 for k = 0, identical to the linear base entry
            entries.append((f"mixed^{k}", float(p1 @ qk[k] @ p1) if k else float(p1 @ p1), k + 2))
        if 1 <= k <= insertions:
            for d in range(3, p.max_degree + 1):
                entries.append((f"pair{d}+ins{k}", _inserted_pair_value(p.part(d), qk[k]), k + 2))
    return entries


def _graph_entries(p: Polynomial, graphs: Sequence[ContractionGraph]) -> list[Entry]:
    return [(f"graph[{canonicalize(g).to_spec()}]", evaluate_graph(g, p), len(g.vertices)) for g in graphs]


def base_invariants(p: Polynomial, max_trace_power: int | None = None, normalization=None) -> FeatureVector:
    return _pack(p, _base_entries(p, max_trace_power), normalization)


def mixed_invariants(
    p: Polynomial, powers: Sequence[int] | None = None, insertions: int = 0, normalization=None
) -> FeatureVector:
    """``sum_ab p_a ([p]^m)_ab p_b`` for each requested ``m`` plus the
    degree-2 insertion variants of the higher pair contractions."""
    powers = tuple(range(p.n)) if powers is None else tuple(powers)
    return _pack(p, _mixed_entries(p, powers, insertions), normalization)


def graph_invariants(p: Polynomial, graphs: Sequence[ContractionGraph | str], normalization=None) -> FeatureVector:
    graphs = CatalogConfig(extra_graphs=tuple(graphs)).resolved_graphs()
    return _pack(p, _graph_entries(p, graphs), normalization)


def relative_invariants(p: Polynomial, q: Polynomial) -> FeatureVector:
    """Cross contractions between two polynomials rotated together."""
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} vs {q.n}")
    top = max(p.max_degree, q.max_degree)
    pp, qq = p.padded(top), q.padded(top)
    names, values = [], []
    for d in range(1, top + 1):
        a, b = pp.part(d), qq.part(d)
        names.append(f"cross{d}")
        values.append(float(np.sum(a.coeffs * b.coeffs / a.weights)))
    names.append("frobenius")
    values.append(frobenius_dot(pp, qq))
    return FeatureVector(tuple(names), values, {"n": p.n, "D": top, "normalization": {}})


def _order_normalized(value: float, k: int) -> float:
    return math.copysign(abs(value) ** (1.0 / k), value) if k > 1 else value


def feature_vector(p: Polynomial, cfg: CatalogConfig | None = None, normalization=None) -> FeatureVector:
    cfg = cfg or CatalogConfig()
    entries = _base_entries(p, cfg.max_trace_power)
    if cfg.include_mixed or cfg.insertions:
        powers = cfg.resolved_powers(p.n) if cfg.include_mixed else ()
        entries += _mixed_entries(p, powers, cfg.insertions)
    entries += _graph_entries(p, cfg.resolved_graphs())
    if cfg.normalize_by_order:
        entries = [(name, _order_normalized(v, k), k) for name, v, k in entries]
    return _pack(p, entries, normalization)


def distance(f: FeatureVector, g: FeatureVector, weights: Sequence[float] | None = None) -> float:
    """Weighted Euclidean distance between two feature vectors of one catalog."""
    check_compatible(f, g)
    diff = f.values - g.values
    if weights is None:
        return float(np.sqrt(diff @ diff))
    w = np.asarray(weights, dtype=float)
    if w.shape != diff.shape or np.any(w <= 0):
        raise ValueError("weights must be positive and match the feature count")
    return float(np.sqrt(np.sum(w * diff * diff)))


def check_compatible(f: FeatureVector, g: FeatureVector) -> None:
    if f.names != g.names:
        raise InputError("feature catalogs differ (names or order)")
    for key in ("n", "D"):
        if f.meta.get(key) != g.meta.get(key):
            raise InputError(f"feature metadata differ in {key!r}: {f.meta.get(key)} vs {g.meta.get(key)}")


def invariant_count_bound(n: int, d: int) -> int:
    """Parameter count of a degree-``d`` homogeneous part minus the dimension
    of the rotation group."""
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    return math.comb(n + d - 1, d) - n * (n - 1) // 2


def spherical_count_bound(n: int, max_degree: int) -> int:
    D = max_degree
    if n < 2 or D < 2:
        raise ValueError("need n >= 2 and D >= 2")
    return math.comb(n + D - 1, D) + math.comb(n + D - 2, D - 1) - n * (n - 1) // 2


# -- Newton identities and degree-2 reconstruction ----------------------------

def elementary_from_power_sums(power_sums: Sequence[float]) -> np.ndarray:
    """Elementary symmetric polynomials ``e_0..e_k`` from power sums ``s_1..s_k``.

    Uses ``k e_k = sum_{i=1..k} (-1)^(i-1) e_{k-i} s_i``.
    """
    s = [0.0, *power_sums]
    e = [1.0]
    for k in range(1, len(s)):
        acc = 0.0
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * s[i]
        e.append(acc / k)
    return np.array(e)


def next_power_sum(power_sums: Sequence[float]) -> float:
    """``s_{n+1}`` of ``n`` numbers given ``s_1..s_n``."""
    n = len(power_sums)
    e = elementary_from_power_sums(power_sums)
    s = [0.0, *power_sums]
    return float(sum((-1) ** (i - 1) * e[i] * s[n + 1 - i] for i in range(1, n + 1)))


def eigenvalues_from_traces(traces: Sequence[float]) -> np.ndarray:
    """Roots of the characteristic polynomial built from ``Tr([p]^m)``, ascending."""
    n = len(traces)
    e = elementary_from_power_sums(traces)
    # prod (x - l_i) = sum_k (-1)^k e_k x^(n-k)
    char = [(-1) ** k * e[k] for k in range(n + 1)]
    roots = np.roots(char) if n else np.array([])
    scale = max(1.0, float(np.max(np.abs(roots)))) if n else 1.0
    # a repeated real root comes back as a small complex cluster with equal
    # real parts, which the caller's gap test flags as degenerate
    if np.any(np.abs(roots.imag) > 1e-3 * scale):
        raise InconsistentFeaturesError("trace powers do not come from a real symmetric matrix")
    return np.sort(roots.real)


def reconstruct_degree2(f: FeatureVector, n: int) -> Polynomial:
    """Canonical representative of a degree-2 polynomial's rotation+reflection
    class: diagonal quadratic part with ascending eigenvalues and a linear part
    with non-negative entries."""
    try:
        const = f["const"]
        traces = [f[f"trace^{m}"] for m in range(1, n + 1)]
        mixed = np.array([f[f"mixed^{m}"] for m in range(n)])
    except KeyError as exc:
        raise InputError(f"feature vector lacks {exc.args[0]!r} needed for reconstruction") from None
    lam = eigenvalues_from_traces(traces)
    scale = max(1.0, float(np.max(np.abs(lam))))
    if n > 1 and np.min(np.diff(lam)) <= SPECTRAL_GAP_TOL * scale:
        raise DegenerateSpectrumError(f"eigenvalues {lam.tolist()} are not separated; the class is not pinned down")
    vander = np.vander(lam, n, increasing=True).T  # rows m, columns a: lam_a^m
    squares = np.linalg.solve(vander, mixed)
    floor = NEGATIVE_SQUARE_TOL * max(1.0, float(np.max(np.abs(squares))))
    if np.any(squares < -floor):
        raise InconsistentFeaturesError(f"recovered squared linear coefficients {squares.tolist()} are negative")
    lin = np.sqrt(np.clip(squares, 0.0, None))
    coeffs = {(0,) * n: const}
    for a in range(n):
        unit = [0] * n
        unit[a] = 1
        coeffs[tuple(unit)] = lin[a]
        unit[a] = 2
        coeffs[tuple(unit)] = lam[a]
    return Polynomial.from_mapping(n, coeffs, max_degree=2)
