"""Cylindrical and real spherical harmonic baselines.

Both give one rotation invariant per degree, ``A_l``, the squared length of
the degree-``l`` coefficient block.  They serve as the reference the
polynomial catalog is compared against.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError

MAX_SPHERICAL_L = 3


@dataclass(frozen=True)
class HarmonicExpansion:
    """Coefficients keyed by ``(l, m)``.

    Cylindrical expansions use ``m = +1`` for ``cos(l phi)``, ``m = -1`` for
    ``sin(l phi)`` and ``(0, 0)`` for the constant.
    """

    kind: str
    max_l: int
    coeffs: Mapping[tuple[int, int], float]

    def __post_init__(self):
        if self.kind not in ("cylindrical", "spherical"):
            raise ValueError(f"unknown harmonic kind {self.kind!r}")
        coeffs = {k: 0.0 for k in harmonic_keys(self.kind, self.max_l)}
        for key, value in dict(self.coeffs).items():
            key = (int(key[0]), int(key[1]))
            if key not in coeffs:
                raise ValueError(f"{key} is not a {self.kind} key for max_l={self.max_l}")
            coeffs[key] = float(value)
        object.__setattr__(self, "coeffs", coeffs)

    def vector(self) -> np.ndarray:
        return np.array(list(self.coeffs.values()))

    def to_dict(self) -> dict:
        return {
            "meta": {"kind": self.kind, "max_l": self.max_l},
            "coeffs": [{"l": l, "m": m, "value": v} for (l, m), v in self.coeffs.items()],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> HarmonicExpansion:
        try:
            meta = data["meta"]
            coeffs = {(int(c["l"]), int(c["m"])): float(c["value"]) for c in data["coeffs"]}
            return cls(meta["kind"], int(meta["max_l"]), coeffs)
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed harmonic JSON: {exc!r}") from None


def harmonic_keys(kind: str, max_l: int) -> list[tuple[int, int]]:
    if kind == "cylindrical":
        return [(0, 0)] + [(l, m) for l in range(1, max_l + 1) for m in (1, -1)]
    return [(l, m) for l in range(max_l + 1) for m in range(-l, l + 1)]


# -- cylindrical ---------------------------------------------------------------

def cylindrical_design(phi: np.ndarray, max_l: int) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    cols = [np.ones_like(phi)]
    for l in range(1, max_l + 1):
        cols += [np.cos(l * phi), np.sin(l * phi)]
    return np.stack(cols, axis=-1)


def cylindrical_fit(phi: Sequence[float], r: Sequence[float], max_l: int) -> HarmonicExpansion:
    """Least squares in ``a_0 + sum_l a_{+l} cos(l phi) + a_{-l} sin(l phi)``."""
    phi = np.asarray(phi, dtype=float)
    r = np.asarray(r, dtype=float)
    if phi.size < 2 * max_l + 1:
        raise ValueError(f"{phi.size} samples cannot determine {2 * max_l + 1} coefficients")
    a, *_ = np.linalg.lstsq(cylindrical_design(phi, max_l), r, rcond=None)
    return HarmonicExpansion("cylindrical", max_l, dict(zip(harmonic_keys("cylindrical", max_l), a)))


def cylindrical_evaluate(h: HarmonicExpansion, phi) -> np.ndarray:
    _require(h, "cylindrical")
    return cylindrical_design(phi, h.max_l) @ h.vector()


def cylindrical_invariants(h: HarmonicExpansion) -> np.ndarray:
    _require(h, "cylindrical")
    c = h.coeffs
    return np.array([c[(0, 0)] ** 2] + [c[(l, 1)] ** 2 + c[(l, -1)] ** 2 for l in range(1, h.max_l + 1)])


# -- real spherical ------------------------------------------------------------

# Unnormalized homogeneous forms of degree l, keyed by (l, m).  The l = 3 row
# follows the standard real harmonic table.
_FORMS = {
    (0, 0): lambda x, y, z: np.ones_like(x),
    (1, -1): lambda x, y, z: y,
    (1, 0): lambda x, y, z: z,
    (1, 1): lambda x, y, z: x,
    (2, -2): lambda x, y, z: x * y,
    (2, -1): lambda x, y, z: y * z,
    (2, 0): lambda x, y, z: 2 * z**2 - x**2 - y**2,
    (2, 1): lambda x, y, z: z * x,
    (2, 2): lambda x, y, z: x**2 - y**2,
    (3, -3): lambda x, y, z: (3 * x**2 - y**2) * y,
    (3, -2): lambda x, y, z: x * y * z,
    (3, -1): lambda x, y, z: y * (4 * z**2 - x**2 - y**2),
    (3, 0): lambda x, y, z: z * (2 * z**2 - 3 * x**2 - 3 * y**2),
    (3, 1): lambda x, y, z: x * (4 * z**2 - x**2 - y**2),
    (3, 2): lambda x, y, z: z * (x**2 - y**2),
    (3, 3): lambda x, y, z: (x**2 - 3 * y**2) * x,
}


def _sphere_quadrature(n_theta: int = 32, n_phi: int = 64):
    """Gauss-Legendre in cos(theta) times a uniform phi grid; exact for
    polynomials of degree < min(2 n_theta, n_phi) on the sphere."""
    t, wt = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    ct, ph = np.meshgrid(t, phi, indexing="ij")
    st = np.sqrt(1 - ct**2)
    pts = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1).reshape(-1, 3)
    w = (wt[:, None] * np.full(n_phi, 2 * np.pi / n_phi)[None, :]).reshape(-1)
    return pts, w


@lru_cache(maxsize=None)
def _norms() -> dict[tuple[int, int], float]:
    pts, w = _sphere_quadrature()
    x, y, z = pts.T
    return {key: 1.0 / np.sqrt(w @ form(x, y, z) ** 2) for key, form in _FORMS.items()}


def spherical_basis(l: int, m: int, direction) -> np.ndarray | float:
    """Unit-L2-norm real spherical harmonic at one or more directions (rescaled
    to unit length before evaluation)."""
    if not 0 <= l <= MAX_SPHERICAL_L:
        raise ValueError(f"spherical harmonics are tabulated for l <= {MAX_SPHERICAL_L}, got l={l}")
    if not -l <= m <= l:
        raise ValueError(f"m={m} out of range for l={l}")
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d, axis=-1, keepdims=True)
    value = _norms()[(l, m)] * _FORMS[(l, m)](d[..., 0], d[..., 1], d[..., 2])
    return float(value) if np.ndim(value) == 0 else value


def spherical_design(directions, max_l: int) -> np.ndarray:
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    return np.stack([spherical_basis(l, m, d) for l, m in harmonic_keys("spherical", max_l)], axis=-1)


def spherical_fit(directions, r: Sequence[float], max_l: int) -> HarmonicExpansion:
    if max_l > MAX_SPHERICAL_L:
        raise ValueError(f"max_l must be <= {MAX_SPHERICAL_L}")
    design = spherical_design(directions, max_l)
    if design.shape[0] < (max_l + 1) ** 2:
        raise ValueError(f"{design.shape[0]} samples cannot determine {(max_l + 1) ** 2} coefficients")
    a, *_ = np.linalg.lstsq(design, np.asarray(r, dtype=float), rcond=None)
    return HarmonicExpansion("spherical", max_l, dict(zip(harmonic_keys("spherical", max_l), a)))


def spherical_evaluate(h: HarmonicExpansion, directions) -> np.ndarray:
    _require(h, "spherical")
    return spherical_design(directions, h.max_l) @ h.vector()


def spherical_invariants(h: HarmonicExpansion) -> np.ndarray:
    _require(h, "spherical")
    return np.array([sum(h.coeffs[(l, m)] ** 2 for m in range(-l, l + 1)) for l in range(h.max_l + 1)])


def fibonacci_sphere(count: int) -> np.ndarray:
    """Near-uniform unit vectors on the golden-angle spiral."""
    i = np.arange(count) + 0.5
    z = 1 - 2 * i / count
    rho = np.sqrt(1 - z**2)
    phi = np.pi * (3 - np.sqrt(5)) * i
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def _require(h: HarmonicExpansion, kind: str) -> None:
    if h.kind != kind:
        raise ValueError(f"expected a {kind} expansion, got {h.kind}")
