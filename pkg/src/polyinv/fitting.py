"""Weighted least-squares polynomial fits to point data.

The ridge term penalises ``sum_l P_l**2 / N_l``, the squared length of the
vectorized polynomial.  That norm is rotation invariant, so the regularised
(and minimum-norm, when rank deficient) solution for a rotated cloud is
exactly the rotated solution.
"""

from __future__ import annotations

import io
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateNormalizationError, InputError
from .tensor_poly import Polynomial, _weights, all_exponents, enumerate_exponents

PINV_RTOL = 1e-10
DEFAULT_RIDGE_FACTOR = 1e-8
RADIAL_MODES = ("none", "gaussian", "exponential")
SCALE_MODES = ("none", "unit")

ATOMIC_MASS = {
    "H": 1.008,
    "C": 12.011,
    "N": 14.007,
    "O": 15.999,
    "F": 18.998,
    "P": 30.974,
    "S": 32.06,
    "Cl": 35.45,
    "Br": 79.904,
    "I": 126.904,
}


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    values: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("a point cloud needs at least one point")
        m = pts.shape[0]
        vals = np.ones(m) if self.values is None else np.array(self.values, dtype=float).reshape(-1)
        wts = np.ones(m) if self.weights is None else np.array(self.weights, dtype=float).reshape(-1)
        if vals.size != m or wts.size != m:
            raise ValueError(f"{m} points but {vals.size} values and {wts.size} weights")
        if np.any(wts <= 0):
            raise ValueError("weights must be positive")
        for a in (pts, vals, wts):
            a.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "weights", wts)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def transformed(self, o) -> PointCloud:
        """Points mapped by ``x -> O x``; values and weights unchanged."""
        return PointCloud(self.points @ np.asarray(o).T, self.values, self.weights)


@dataclass(frozen=True)
class NormalizationRecord:
    centroid: tuple[float, ...]
    scale: float = 1.0
    mode: str = "none"

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if self.mode not in SCALE_MODES:
            raise ValueError(f"unknown scale mode {self.mode!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["centroid"] = list(self.centroid)
        return d

    def apply(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - np.asarray(self.centroid)) / self.scale


@dataclass(frozen=True)
class FitConfig:
    """``ridge=None`` selects ``1e-8 * mean(diag(S M^T M S))`` with
    ``S = diag(sqrt(N_l))``, the normal matrix in the invariant coordinates."""

    max_degree: int
    ridge: float | None = None
    radial_weight: str = "none"
    spherical: bool = False

    def __post_init__(self):
        if self.max_degree < 1:
            raise ValueError("max_degree must be >= 1")
        if self.spherical and self.max_degree < 2:
            raise ValueError("spherical fits need max_degree >= 2")
        if self.ridge is not None and self.ridge < 0:
            raise ValueError("ridge must be non-negative")
        if self.radial_weight not in RADIAL_MODES:
            raise ValueError(f"radial_weight must be one of {RADIAL_MODES}")
        if self.spherical and self.radial_weight != "none":
            raise ValueError("radial weighting is constant on the unit sphere; use radial_weight='none'")


@dataclass(frozen=True)
class FitDiagnostics:
    """``residual`` is the weighted root-mean-square misfit
    ``|M a - b| / sqrt(sum w)``, in the units of the fitted values."""

    rank: int
    residual: float
    condition: float
    ridge: float = 0.0

    def to_dict(self) -> dict:
        return {"rank": self.rank, "residual": self.residual, "condition": self.condition}


def normalize(pc: PointCloud, mode: str = "unit") -> tuple[PointCloud, NormalizationRecord]:
    """Shift the weighted centroid to the origin and, for ``mode='unit'``,
    rescale so the weighted mean distance from it is 1."""
    if mode not in SCALE_MODES:
        raise ValueError(f"unknown scale mode {mode!r}")
    w = pc.weights / pc.weights.sum()
    centroid = w @ pc.points
    centered = pc.points - centroid
    scale = 1.0
    if mode == "unit":
        scale = float(w @ np.linalg.norm(centered, axis=1))
        if not scale > 1e-300:
            raise DegenerateNormalizationError("all points coincide with the centroid; scale is zero")
        centered = centered / scale
    record = NormalizationRecord(tuple(centroid.tolist()), scale, mode)
    return PointCloud(centered, pc.values, pc.weights), record


def basis_exponents(n: int, cfg: FitConfig):
    if cfg.spherical:
        D = cfg.max_degree
        return enumerate_exponents(n, D - 1) + enumerate_exponents(n, D)
    return all_exponents(n, cfg.max_degree)


def monomials(points: np.ndarray, exponents) -> np.ndarray:
    ells = np.array(exponents, dtype=float).reshape(len(exponents), -1)
    return np.prod(points[:, None, :] ** ells[None, :, :], axis=-1)


def radial_factor(points: np.ndarray, mode: str) -> np.ndarray:
    r = np.linalg.norm(points, axis=1)
    if mode == "gaussian":
        return np.exp(-(r**2))
    if mode == "exponential":
        return np.exp(-r)
    return np.ones_like(r)


def design_matrix(pc: PointCloud, cfg: FitConfig) -> tuple[np.ndarray, np.ndarray]:
    pts = pc.points
    if cfg.spherical:
        r = np.linalg.norm(pts, axis=1)
        if np.any(r == 0):
            raise ValueError("a point at the origin has no direction")
        pts = pts / r[:, None]
    m = monomials(pts, basis_exponents(pc.n, cfg))
    m = m * radial_factor(pts, cfg.radial_weight)[:, None]
    sw = np.sqrt(pc.weights)
    return m * sw[:, None], pc.values * sw


def _basis_weights(n: int, cfg: FitConfig) -> np.ndarray:
    if cfg.spherical:
        D = cfg.max_degree
        return np.concatenate([_weights(n, D - 1), _weights(n, D)])
    return np.concatenate([_weights(n, d) for d in range(cfg.max_degree + 1)])


def solve_ridge(m: np.ndarray, b: np.ndarray, ridge: float, col_scale: np.ndarray | None = None):
    """Minimise ``|M a - b|^2 + ridge * |a / col_scale|^2`` by SVD.

    Singular values below ``1e-10 * s_max`` are dropped.  Returns the
    coefficients, the numerical rank and the condition number of the kept
    spectrum.
    """
    s_col = np.ones(m.shape[1]) if col_scale is None else col_scale
    u, s, vt = np.linalg.svd(m * s_col, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros(m.shape[1]), 0, math.inf
    keep = s > PINV_RTOL * s[0]
    filt = np.where(keep, s / (s**2 + ridge), 0.0)
    a = s_col * (vt.T @ (filt * (u.T @ b)))
    rank = int(keep.sum())
    return a, rank, float(s[0] / s[keep][-1])


def fit(pc: PointCloud, cfg: FitConfig) -> tuple[Polynomial, FitDiagnostics]:
    """Least-squares fit of ``f(x) = radial(x) * p(x)`` to the cloud values.

    In spherical mode only degrees ``D-1`` and ``D`` are fitted, evaluated at
    the unit directions of the points.
    """
    m, b = design_matrix(pc, cfg)
    scale = np.sqrt(_basis_weights(pc.n, cfg))
    if cfg.ridge is None:
        # diagonal of the column-scaled normal matrix; its mean is rotation invariant
        ridge = DEFAULT_RIDGE_FACTOR * float(np.mean(np.sum((m * scale) ** 2, axis=0)))
    else:
        ridge = float(cfg.ridge)
    a, rank, cond = solve_ridge(m, b, ridge, scale)
    residual = float(np.linalg.norm(m @ a - b) / math.sqrt(pc.weights.sum()))

    D = cfg.max_degree
    if cfg.spherical:
        poly = Polynomial.from_mapping(pc.n, dict(zip(basis_exponents(pc.n, cfg), a)), max_degree=D)
    else:
        poly = Polynomial.from_coefficients(pc.n, D, a)
    return poly, FitDiagnostics(rank, residual, cond, ridge)


def fit_spherical(
    pc: PointCloud, max_degree: int, ridge: float | None = None, texture: bool = False
) -> tuple[Polynomial, FitDiagnostics]:
    """Fit ``r(x_hat) = p_{D-1}(x_hat) + p_D(x_hat)``.

    The target is the distance ``|x|`` of each point (an envelope) unless
    ``texture`` is set, in which case the cloud's own values are used.
    """
    r = np.linalg.norm(pc.points, axis=1)
    if np.any(r == 0):
        raise ValueError("a point at the origin has no direction")
    target = pc.values if texture else r
    cloud = PointCloud(pc.points, target, pc.weights)
    return fit(cloud, FitConfig(max_degree, ridge=ridge, spherical=True))


# -- readers and writers -------------------------------------------------------

def read_points_csv(text: str, dim: int | None = None) -> tuple[PointCloud, int]:
    """Parse ``x1..xn[,value[,weight]]`` rows.

    All rows must have the same number of fields.  The dimension is the
    field count unless ``dim`` is given or ``# n=<dim>`` appears in a comment,
    in which case the remaining fields are value and weight.  An explicit
    ``dim`` overrides the comment.  Returns the cloud and dimension.
    """
    forced = dim
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n="):
                try:
                    dim = int(body[2:].split()[0])
                except ValueError:
                    raise InputError(f"bad dimension comment {line!r}", lineno) from None
            continue
        if not line:
            continue
        try:
            fields = [float(tok) for tok in line.split(",")]
        except ValueError:
            raise InputError(f"non-numeric field in row {raw!r}", lineno) from None
        if rows and len(fields) != len(rows[0][1]):
            raise InputError(f"row has {len(fields)} fields, expected {len(rows[0][1])}", lineno)
        rows.append((lineno, fields))
    if not rows:
        raise InputError("no data rows")
    width = len(rows[0][1])
    dim = forced if forced is not None else dim
    dim = width if dim is None else dim
    if not 1 <= dim <= width or width - dim > 2:
        raise InputError(f"cannot split {width} fields into {dim} coordinates plus value/weight", rows[0][0])
    data = np.array([f for _, f in rows])
    values = data[:, dim] if width > dim else None
    weights = data[:, dim + 1] if width > dim + 1 else None
    if weights is not None and np.any(weights <= 0):
        bad = rows[int(np.argmax(weights <= 0))][0]
        raise InputError("weights must be positive", bad)
    return PointCloud(data[:, :dim], values, weights), dim


def write_points_csv(pc: PointCloud, header: Sequence[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    out.write(f"# n={pc.n}\n")
    for x, v, w in zip(pc.points, pc.values, pc.weights):
        out.write(",".join(repr(float(c)) for c in (*x, v, w)) + "\n")
    return out.getvalue()


@dataclass(frozen=True)
class Molecule:
    elements: tuple[str, ...]
    coords: np.ndarray
    comment: str = ""

    def cloud(self, value_source: str = "mass") -> PointCloud:
        if value_source == "one":
            values = np.ones(len(self.elements))
        elif value_source == "mass":
            try:
                values = np.array([ATOMIC_MASS[el] for el in self.elements])
            except KeyError as exc:
                raise InputError(f"no atomic mass for element {exc.args[0]!r}") from None
        else:
            raise ValueError(f"unknown value source {value_source!r}")
        return PointCloud(self.coords, values)


def read_xyz(text: str) -> Molecule:
    lines = text.splitlines()
    if not lines:
        raise InputError("empty XYZ input", 1)
    try:
        count = int(lines[0].split()[0])
    except (ValueError, IndexError):
        raise InputError(f"first line must be the atom count, got {lines[0]!r}", 1) from None
    if len(lines) < count + 2:
        raise InputError(f"expected {count} atom rows, found {max(0, len(lines) - 2)}", len(lines))
    elements, coords = [], []
    for lineno in range(3, count + 3):
        parts = lines[lineno - 1].split()
        if len(parts) < 4:
            raise InputError(f"atom row needs 'El x y z', got {lines[lineno - 1]!r}", lineno)
        el = parts[0].capitalize()
        try:
            xyz = [float(t) for t in parts[1:4]]
        except ValueError:
            raise InputError(f"non-numeric coordinate in {lines[lineno - 1]!r}", lineno) from None
        elements.append(el)
        coords.append(xyz)
    return Molecule(tuple(elements), np.array(coords), lines[1] if len(lines) > 1 else "")


def write_xyz(mol: Molecule, comment: str | None = None) -> str:
    rows = [str(len(mol.elements)), mol.comment if comment is None else comment]
    for el, (x, y, z) in zip(mol.elements, mol.coords):
        rows.append(f"{el} {float(x)!r} {float(y)!r} {float(z)!r}")
    return "\n".join(rows) + "\n"
