"""Graded symmetric-tensor polynomials.

A polynomial in ``n`` variables of degree ``D`` is stored as a list of
homogeneous parts.  Each part keeps one coefficient ``P_l`` per exponent
``l`` (a multi-index with ``|l| = d``), in graded-lexicographic order.  The
fully symmetric tensor with entries ``p_i = P_l / N_l`` is built only when a
computation needs index access (rotation, graph contraction).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]

ORTHOGONALITY_TOL = 1e-10
INT64_MAX = 2**63 - 1


def degree(ell: Sequence[int]) -> int:
    return int(sum(ell))


@lru_cache(maxsize=None)
def enumerate_exponents(n: int, d: int) -> tuple[Exponent, ...]:
    """All exponents of total degree ``d`` in ``n`` variables.

    Ordered lexicographically descending, so ``(2, 0)`` precedes ``(1, 1)``.
    The count is ``comb(n + d - 1, d)``.
    """
    if n < 1 or d < 0:
        raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    if n == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        for rest in enumerate_exponents(n - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


def all_exponents(n: int, max_degree: int) -> tuple[Exponent, ...]:
    """Exponents of every degree ``0..max_degree`` in canonical order."""
    return tuple(ell for d in range(max_degree + 1) for ell in enumerate_exponents(n, d))


def multinomial_weight(ell: Sequence[int]) -> int:
    """Number of index sequences whose sorted form has powers ``ell``.

    Raises OverflowError when the count does not fit a signed 64-bit integer.
    """
    if any(k < 0 for k in ell):
        raise ValueError(f"negative power in exponent {tuple(ell)}")
    total = 0
    weight = 1
    for k in ell:
        total += k
        weight *= math.comb(total, k)
        if weight > INT64_MAX:
            raise OverflowError(f"multinomial weight of {tuple(ell)} exceeds int64 range")
    return weight


@lru_cache(maxsize=None)
def _weights(n: int, d: int) -> np.ndarray:
    w = np.array([multinomial_weight(ell) for ell in enumerate_exponents(n, d)], dtype=float)
    w.setflags(write=False)
    return w


@lru_cache(maxsize=None)
def _index_map(n: int, d: int) -> np.ndarray:
    """For every index sequence in ``range(n)**d`` (C order), the position of
    its exponent in ``enumerate_exponents(n, d)``."""
    position = {ell: i for i, ell in enumerate(enumerate_exponents(n, d))}
    out = np.empty(n**d, dtype=np.intp)
    for flat, idx in enumerate(itertools.product(range(n), repeat=d)):
        ell = [0] * n
        for i in idx:
            ell[i] += 1
        out[flat] = position[tuple(ell)]
    out.setflags(write=False)
    return out


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HomogeneousPart:
    """Degree-``d`` part stored as ``P_l`` values in canonical exponent order."""

    n: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.n < 1 or self.degree < 0:
            raise ValueError(f"need n >= 1 and degree >= 0, got n={self.n}, degree={self.degree}")
        coeffs = _frozen(self.coeffs).reshape(-1)
        expected = math.comb(self.n + self.degree - 1, self.degree)
        if coeffs.size != expected:
            raise ValueError(
                f"degree-{self.degree} part in {self.n} variables needs {expected} coefficients, "
                f"got {coeffs.size}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zeros(cls, n: int, d: int) -> HomogeneousPart:
        return cls(n, d, np.zeros(len(enumerate_exponents(n, d))))

    @classmethod
    def from_mapping(cls, n: int, d: int, coeffs: Mapping[Exponent, float]) -> HomogeneousPart:
        position = {ell: i for i, ell in enumerate(enumerate_exponents(n, d))}
        values = np.zeros(len(position))
        for ell, value in coeffs.items():
            ell = tuple(int(k) for k in ell)
            if ell not in position:
                raise ValueError(f"exponent {ell} is not a degree-{d} exponent in {n} variables")
            values[position[ell]] = value
        return cls(n, d, values)

    @classmethod
    def from_tensor(cls, tensor: np.ndarray) -> HomogeneousPart:
        """Collect a (not necessarily symmetric) order-``d`` tensor into ``P_l`` form."""
        tensor = np.asarray(tensor, dtype=float)
        d = tensor.ndim
        n = tensor.shape[0] if d else 1
        if d == 0:
            return cls(n, 0, tensor.reshape(1))
        coeffs = np.bincount(
            _index_map(n, d), weights=tensor.reshape(-1), minlength=len(enumerate_exponents(n, d))
        )
        return cls(n, d, coeffs)

    @property
    def exponents(self) -> tuple[Exponent, ...]:
        return enumerate_exponents(self.n, self.degree)

    @property
    def weights(self) -> np.ndarray:
        return _weights(self.n, self.degree)

    def items(self) -> Iterable[tuple[Exponent, float]]:
        return zip(self.exponents, self.coeffs.tolist())

    def coeff(self, ell: Sequence[int]) -> float:
        ell = tuple(ell)
        return float(self.coeffs[self.exponents.index(ell)])

    def symmetric_tensor(self) -> np.ndarray:
        """Dense tensor of shape ``(n,)*d`` with entries ``P_l / N_l``."""
        if self.degree == 0:
            return np.array(self.coeffs[0])
        sym = self.coeffs / self.weights
        return sym[_index_map(self.n, self.degree)].reshape((self.n,) * self.degree)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at one point ``(n,)`` or a batch ``(m, n)``."""
        x = np.asarray(x, dtype=float)
        ells = np.array(self.exponents, dtype=float).reshape(-1, self.n)
        monomials = np.prod(x[..., None, :] ** ells, axis=-1)
        return monomials @ self.coeffs

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPart):
            return NotImplemented
        return (self.n, self.degree) == (other.n, other.degree) and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Sum of homogeneous parts of degrees ``0..D`` in ``n`` variables."""

    n: int
    parts: tuple[HomogeneousPart, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("a polynomial needs at least the degree-0 part")
        for d, part in enumerate(parts):
            if part.n != self.n or part.degree != d:
                raise ValueError(
                    f"part {d} has n={part.n}, degree={part.degree}; expected n={self.n}, degree={d}"
                )
        object.__setattr__(self, "parts", parts)

    @property
    def max_degree(self) -> int:
        return len(self.parts) - 1

    D = max_degree

    @classmethod
    def zeros(cls, n: int, max_degree: int) -> Polynomial:
        return cls(n, tuple(HomogeneousPart.zeros(n, d) for d in range(max_degree + 1)))

    @classmethod
    def from_mapping(cls, n: int, coeffs: Mapping[Exponent, float], max_degree: int | None = None) -> Polynomial:
        """Build from ``{exponent: P_l}``; ``max_degree`` defaults to the largest key degree."""
        by_degree: dict[int, dict] = {}
        for ell, value in coeffs.items():
            if len(ell) != n:
                raise ValueError(f"exponent {tuple(ell)} does not have {n} entries")
            by_degree.setdefault(degree(ell), {})[tuple(ell)] = value
        top = max(by_degree, default=0) if max_degree is None else max_degree
        if by_degree and max(by_degree) > top:
            raise ValueError(f"coefficient of degree {max(by_degree)} exceeds max_degree={top}")
        return cls(n, tuple(HomogeneousPart.from_mapping(n, d, by_degree.get(d, {})) for d in range(top + 1)))

    @classmethod
    def from_coefficients(cls, n: int, max_degree: int, values: Sequence[float]) -> Polynomial:
        """Inverse of :meth:`coefficients`."""
        values = np.asarray(values, dtype=float).reshape(-1)
        parts, start = [], 0
        for d in range(max_degree + 1):
            size = math.comb(n + d - 1, d)
            parts.append(HomogeneousPart(n, d, values[start:start + size]))
            start += size
        if start != values.size:
            raise ValueError(f"expected {start} coefficients, got {values.size}")
        return cls(n, tuple(parts))

    @classmethod
    def random(cls, n: int, max_degree: int, rng: np.random.Generator) -> Polynomial:
        return cls.from_coefficients(n, max_degree, rng.standard_normal(len(all_exponents(n, max_degree))))

    def part(self, d: int) -> HomogeneousPart:
        """Degree-``d`` part; all-zero when ``d`` exceeds the stored degree."""
        if d <= self.max_degree:
            return self.parts[d]
        return HomogeneousPart.zeros(self.n, d)

    def coefficients(self) -> np.ndarray:
        """Flat ``P_l`` vector in canonical exponent order."""
        return np.concatenate([part.coeffs for part in self.parts])

    def padded(self, max_degree: int) -> Polynomial:
        if max_degree < self.max_degree:
            raise ValueError("padding cannot drop parts")
        return Polynomial(self.n, tuple(self.part(d) for d in range(max_degree + 1)))

    def scaled(self, s: float) -> Polynomial:
        return Polynomial(self.n, tuple(HomogeneousPart(self.n, p.degree, s * p.coeffs) for p in self.parts))

    def __call__(self, x) -> np.ndarray:
        return evaluate(self, x)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self.parts == other.parts

    __hash__ = None

    def __repr__(self):
        nz = {ell: v for part in self.parts for ell, v in part.items() if v}
        return f"Polynomial(n={self.n}, D={self.max_degree}, {nz})"


@dataclass(frozen=True, eq=False)
class OrthogonalMatrix:
    entries: np.ndarray

    def __post_init__(self):
        o = _frozen(self.entries)
        if o.ndim != 2 or o.shape[0] != o.shape[1]:
            raise ValueError(f"orthogonal matrix must be square, got shape {o.shape}")
        err = np.max(np.abs(o.T @ o - np.eye(o.shape[0])))
        if err > ORTHOGONALITY_TOL:
            raise ValueError(f"matrix is not orthogonal: max |O^T O - I| = {err:.3e}")
        object.__setattr__(self, "entries", o)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def T(self) -> OrthogonalMatrix:
        return OrthogonalMatrix(self.entries.T)

    def __matmul__(self, other):
        other = other.entries if isinstance(other, OrthogonalMatrix) else np.asarray(other)
        out = self.entries @ other
        return OrthogonalMatrix(out) if out.ndim == 2 else out

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def random_orthogonal(n: int, rng: np.random.Generator, det: int | None = None) -> OrthogonalMatrix:
    """Haar-distributed orthogonal matrix from the QR factors of a Gaussian matrix.

    The diagonal of R is made positive so the distribution is uniform.  With
    ``det=+1`` or ``det=-1`` the first column is flipped as needed.
    """
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if det is not None:
        if det not in (1, -1):
            raise ValueError("det must be +1 or -1")
        if np.sign(np.linalg.det(q)) != det:
            q[:, 0] = -q[:, 0]
    return OrthogonalMatrix(q)


def as_orthogonal(o) -> OrthogonalMatrix:
    return o if isinstance(o, OrthogonalMatrix) else OrthogonalMatrix(o)


def evaluate(p: Polynomial, x) -> np.ndarray | float:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != p.n:
        raise ValueError(f"point has dimension {x.shape[-1]}, polynomial has n={p.n}")
    total = sum(part.evaluate(x) for part in p.parts)
    return float(total) if np.ndim(total) == 0 else total


def _rotate_tensor(tensor: np.ndarray, o: np.ndarray) -> np.ndarray:
    # contracting axis 0 with O's rows and appending the new axis at the end
    # cycles through all modes, so after ``ndim`` steps the order is restored
    for _ in range(tensor.ndim):
        tensor = np.tensordot(tensor, o, axes=([0], [0]))
    return tensor


def apply_rotation(p: Polynomial, o) -> Polynomial:
    """Coefficients of ``x -> p(O x)``."""
    o = as_orthogonal(o)
    if o.n != p.n:
        raise ValueError(f"rotation is {o.n}x{o.n}, polynomial has n={p.n}")
    if np.array_equal(o.entries, np.eye(o.n)):
        # expand/collect would perturb the last bit
        return p
    parts = []
    for part in p.parts:
        if part.degree == 0 or part.is_zero():
            parts.append(part)
        else:
            parts.append(HomogeneousPart.from_tensor(_rotate_tensor(part.symmetric_tensor(), o.entries)))
    return Polynomial(p.n, tuple(parts))


def quadratic_matrix(p: Polynomial) -> np.ndarray:
    """Symmetric matrix ``[p]`` with ``p2(x) = x^T [p] x``."""
    return p.part(2).symmetric_tensor()


def linear_vector(p: Polynomial) -> np.ndarray:
    return p.part(1).coeffs.copy()


def vectorize(p: Polynomial) -> np.ndarray:
    """``P_l / sqrt(N_l)`` over all exponents; dot products of these vectors
    are full index contractions and hence rotation invariant."""
    return np.concatenate([part.coeffs / np.sqrt(part.weights) for part in p.parts])


def frobenius_dot(p: Polynomial, q: Polynomial) -> float:
    if p.n != q.n or p.max_degree != q.max_degree:
        raise ValueError(
            f"shape mismatch: (n={p.n}, D={p.max_degree}) vs (n={q.n}, D={q.max_degree})"
        )
    return float(vectorize(p) @ vectorize(q))


def to_dict(p: Polynomial) -> dict:
    parts = []
    for part in p.parts:
        coeffs = [{"exponent": list(ell), "value": v} for ell, v in part.items() if v != 0.0]
        parts.append({"degree": part.degree, "coeffs": coeffs})
    return {"n": p.n, "D": p.max_degree, "parts": parts}


def from_dict(data: Mapping) -> Polynomial:
    try:
        n, top = int(data["n"]), int(data["D"])
        coeffs = {}
        for part in data.get("parts", []):
            d = int(part["degree"])
            for entry in part.get("coeffs", []):
                ell = tuple(int(k) for k in entry["exponent"])
                if len(ell) != n or degree(ell) != d:
                    raise ValueError(f"exponent {ell} does not belong to a degree-{d} part in n={n}")
                coeffs[ell] = float(entry["value"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed polynomial JSON: {exc!r}") from exc
    return Polynomial.from_mapping(n, coeffs, max_degree=top)
