"""Multidimensional discrete constellations and their axis projections.

A constellation is a set of M points in B real or complex dimensions, used
as the input alphabet of a block-fading channel after linear precoding and
component interleaving.  Points are kept normalized so the average energy
per component is one.  The axis projection keeps the induced marginal
probabilities (coincident coordinates merge and their mass accumulates),
which is what the scalar channel of one surviving fading block sees.
"""

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

DEDUP_TOL = 1e-6
DISTINCT_TOL = 1e-9
SYMMETRY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Constellation:
    """Labeled point set: `points` has shape (M, B), real or complex.

    `m` is bits per symbol (log2 M, possibly fractional for custom sets).
    `real_base`, when present, is the unit-energy real constellation Psi
    such that this complex constellation equals Psi + j*Psi with
    independent real/imaginary parts; it enables the exact two-channel
    reduction of the mutual information.
    """

    name: str
    B: int
    field: str  # "real" | "complex"
    points: np.ndarray
    m: float
    real_base: "Constellation | None" = None

    @property
    def M(self) -> int:
        return self.points.shape[0]

    def energy_per_component(self) -> float:
        return float(np.mean(np.abs(self.points) ** 2))


@dataclass(frozen=True, eq=False)
class ProjectionSet:
    """Distinct 1-D coordinate values of a constellation along one axis.

    `probs[k]` is the probability mass merged into `values[k]` (multiple
    points projecting onto the same coordinate accumulate).
    """

    values: np.ndarray
    probs: np.ndarray
    dedup_tolerance: float

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def entropy_bits(self) -> float:
        p = self.probs
        return float(-np.sum(p * np.log2(p)))


def _validate_points(points: np.ndarray, B: int) -> None:
    M = points.shape[0]
    if B < 1:
        raise ValueError("B must be >= 1")
    if M < 2:
        raise ValueError("a constellation needs at least 2 points")
    if points.shape != (M, B):
        raise ValueError(f"points must have shape (M, {B})")
    d = _pairwise_min_distance(points)
    if d <= DISTINCT_TOL:
        raise ValueError(f"points are not pairwise distinct (min distance {d:.3g})")


def _pairwise_min_distance(points: np.ndarray) -> float:
    M = points.shape[0]
    best = math.inf
    for i0 in range(0, M, 256):
        block = points[i0 : i0 + 256]
        diff = block[:, None, :] - points[None, :, :]
        d2 = np.sum(np.abs(diff) ** 2, axis=-1)
        rows = np.arange(block.shape[0])
        d2[rows, i0 + rows] = math.inf
        best = min(best, float(np.sqrt(d2.min())))
    return best


def make_constellation(name, points, field, real_base=None) -> Constellation:
    """Validate, normalize, and freeze a constellation."""
    dtype = complex if field == "complex" else float
    pts = np.asarray(points, dtype=dtype)
    if pts.ndim == 1:
        pts = pts[:, None]
    B = pts.shape[1]
    _validate_points(pts, B)
    scale = 1.0 / math.sqrt(float(np.mean(np.abs(pts) ** 2)))
    pts = pts * scale
    pts.setflags(write=False)
    m = math.log2(pts.shape[0])
    return Constellation(name=name, B=B, field=field, points=pts, m=m, real_base=real_base)


def normalize_energy(c: Constellation) -> Constellation:
    """Rescale all points by one scalar so mean per-component energy is 1."""
    return make_constellation(c.name, c.points, c.field, real_base=c.real_base)


def cartesian_product(factor: Constellation, B: int) -> Constellation:
    """B-fold Cartesian product of a one-dimensional constellation."""
    if factor.B != 1:
        raise ValueError("cartesian_product needs a 1-D factor constellation")
    if B < 2:
        raise ValueError("B must be >= 2 for a product constellation")
    vals = factor.points[:, 0]
    pts = np.array(list(itertools.product(vals, repeat=B)))
    base = None
    if factor.field == "complex":
        base = _separable_real_base(factor, B)
    return make_constellation(f"{factor.name}^{B}", pts, factor.field, real_base=base)


def _separable_real_base(factor: Constellation, B: int) -> "Constellation | None":
    """Unit-energy real product base Psi for factors of the form A + jA.

    Returns None unless the factor's points are exactly the grid of one
    real value set against itself (independent real/imaginary parts).
    """
    vals = factor.points[:, 0]
    re = _dedup_real(vals.real, DEDUP_TOL)
    im = _dedup_real(vals.imag, DEDUP_TOL)
    if len(re) * len(im) != vals.size:
        return None
    if len(re) != len(im) or np.max(np.abs(re - im)) > DEDUP_TOL:
        return None
    grid = {(round(a / DEDUP_TOL), round(b / DEDUP_TOL)) for a in re for b in im}
    got = {(round(v.real / DEDUP_TOL), round(v.imag / DEDUP_TOL)) for v in vals}
    if grid != got:
        return None
    base1d = make_constellation(f"{factor.name}.re", re[:, None], "real")
    return cartesian_product(base1d, B)


def _dedup_real(values: np.ndarray, tol: float):
    order = np.argsort(values)
    v = values[order]
    groups = [[v[0]]]
    for x in v[1:]:
        if x - groups[-1][-1] <= tol:
            groups[-1].append(x)
        else:
            groups.append([x])
    return np.array([float(np.mean(g)) for g in groups])


def project(c: Constellation, axis: int, tol: float = DEDUP_TOL) -> ProjectionSet:
    """Distinct coordinate values along `axis` (1-based), merged within tol."""
    if not 1 <= axis <= c.B:
        raise ValueError(f"axis must be in 1..{c.B}")
    col = c.points[:, axis - 1]
    if c.field == "complex":
        values, counts = _cluster_complex(col, tol)
    else:
        values, counts = _cluster_real(col, tol)
    probs = counts / c.M
    return ProjectionSet(values=values, probs=probs, dedup_tolerance=tol)


def _cluster_real(col, tol):
    order = np.argsort(col)
    v = col[order]
    reps, counts = [v[0]], [1]
    for x in v[1:]:
        if x - reps[-1] <= tol:
            counts[-1] += 1
        else:
            reps.append(x)
            counts.append(1)
    return np.asarray(reps, dtype=float), np.asarray(counts, dtype=float)


def _cluster_complex(col, tol):
    reps, counts = [], []
    for z in col:
        for k, r in enumerate(reps):
            if abs(z - r) <= tol:
                counts[k] += 1
                break
        else:
            reps.append(z)
            counts.append(1)
    order = np.lexsort((np.imag(reps), np.real(reps)))
    return np.asarray(reps, dtype=complex)[order], np.asarray(counts, dtype=float)[order]


def check_symmetry(c: Constellation, tol: float = SYMMETRY_TOL) -> bool:
    """Equal-axis-projection symmetry of the point set.

    B=2: invariance under a quarter turn (u1, u2) -> (-u2, u1).
    B>2: invariance under a one-step cyclic shift of the components.
    Constellations passing this check project identically on every axis,
    so a single axis-crossing radius describes all of them.
    """
    if c.B == 1:
        return True
    if c.B == 2:
        image = np.stack([-c.points[:, 1], c.points[:, 0]], axis=1)
    else:
        image = np.roll(c.points, 1, axis=1)
    return _set_contains(c.points, image, tol)


def _set_contains(points, image, tol):
    diff = image[:, None, :] - points[None, :, :]
    d = np.sqrt(np.sum(np.abs(diff) ** 2, axis=-1))
    return bool(np.all(d.min(axis=1) <= tol))


def min_distance(c: Constellation) -> float:
    """Minimum Euclidean distance over distinct point pairs."""
    return _pairwise_min_distance(c.points)


def min_product_distance(c: Constellation) -> float:
    """Minimum over distinct pairs of the product of per-component
    absolute differences; zero whenever two points share a coordinate."""
    M = c.points.shape[0]
    best = math.inf
    for i0 in range(0, M, 256):
        block = c.points[i0 : i0 + 256]
        diff = np.abs(block[:, None, :] - c.points[None, :, :])
        prod = np.prod(diff, axis=-1)
        rows = np.arange(block.shape[0])
        prod[rows, i0 + rows] = math.inf
        best = min(best, float(prod.min()))
    return best


# ---------------------------------------------------------------------------
# Named registry
# ---------------------------------------------------------------------------

def _bpsk():
    return make_constellation("bpsk", [[-1.0], [1.0]], "real")


def _pam4():
    return make_constellation("pam4", [[-3.0], [-1.0], [1.0], [3.0]], "real")


def _qam4():
    pts = [[a + 1j * b] for a in (-1, 1) for b in (-1, 1)]
    return make_constellation("qam4", pts, "complex")


def _star8_points():
    # unit-radius 4-QAM corners plus axis points; the axis radius sqrt(3)
    # makes the 8-point set unit-energy per component without rescaling
    s = 1.0 / math.sqrt(2.0)
    r = math.sqrt(3.0)
    corners = [(a * s, b * s) for a in (-1, 1) for b in (-1, 1)]
    axes = [(r, 0.0), (-r, 0.0), (0.0, r), (0.0, -r)]
    return corners + axes


def _qam8_star():
    pts = [[a + 1j * b] for a, b in _star8_points()]
    return make_constellation("qam8_star", pts, "complex")


def _qam16_grid():
    levels = (-3, -1, 1, 3)
    pts = [[a + 1j * b] for a in levels for b in levels]
    return make_constellation("qam16_grid", pts, "complex")


def _cross_qam32():
    levels = (-5, -3, -1, 1, 3, 5)
    pts = [
        [a + 1j * b]
        for a in levels
        for b in levels
        if not (abs(a) == 5 and abs(b) == 5)
    ]
    return make_constellation("cross_qam32", pts, "complex")


def _r2_4():
    pts = [(a, b) for a in (-1, 1) for b in (-1, 1)]
    return make_constellation("r2_4", pts, "real")


def _r2_8():
    return make_constellation("r2_8", _star8_points(), "real")


def _r2_16():
    c = cartesian_product(_pam4(), 2)
    return make_constellation("r2_16", c.points, "real")


def _r3_8():
    c = cartesian_product(_bpsk(), 3)
    return make_constellation("r3_8", c.points, "real")


# Five orbits of cyclic shifts plus the origin; the base triples sit on
# circles in planes perpendicular to the (1,1,1) axis.
_R3_16_BASE = [
    (0.0, 1.0, -1.0),
    (1.9, 0.12, 0.12),
    (1.3, -0.5, 1.3),
    (0.5, -1.3, -1.3),
    (-1.9, -0.1, -0.1),
]


def _r3_16():
    pts = []
    for a, b, c in _R3_16_BASE:
        pts += [(a, b, c), (b, c, a), (c, a, b)]
    pts.append((0.0, 0.0, 0.0))
    return make_constellation("r3_16", pts, "real")


def _r3_64():
    c = cartesian_product(_pam4(), 3)
    return make_constellation("r3_64", c.points, "real")


def _complex_product(factor_builder, B, name):
    c = cartesian_product(factor_builder(), B)
    return Constellation(
        name=name, B=c.B, field=c.field, points=c.points, m=c.m, real_base=c.real_base
    )


_REGISTRY = {
    "bpsk": _bpsk,
    "pam4": _pam4,
    "qam4": _qam4,
    "qam8_star": _qam8_star,
    "qam16_grid": _qam16_grid,
    "cross_qam32": _cross_qam32,
    "r2_4": _r2_4,
    "r2_8": _r2_8,
    "r2_16": _r2_16,
    "r3_8": _r3_8,
    "r3_16": _r3_16,
    "r3_64": _r3_64,
    "c2_16": lambda: _complex_product(_qam4, 2, "c2_16"),
    "c2_64": lambda: _complex_product(_qam8_star, 2, "c2_64"),
    "c2_256": lambda: _complex_product(_qam16_grid, 2, "c2_256"),
    "c2_1024": lambda: _complex_product(_cross_qam32, 2, "c2_1024"),
}


def registry_names():
    return sorted(_REGISTRY)


def build_named(name: str, params: dict | None = None) -> Constellation:
    """Build a constellation from the named registry."""
    if name not in _REGISTRY:
        raise KeyError(f"unknown constellation {name!r}; known: {', '.join(registry_names())}")
    if params:
        raise ValueError(f"registry entry {name!r} takes no parameters")
    return _REGISTRY[name]()


# ---------------------------------------------------------------------------
# JSON constellation files
# ---------------------------------------------------------------------------

def to_dict(c: Constellation) -> dict:
    if c.field == "complex":
        pts = [[[float(z.real), float(z.imag)] for z in row] for row in c.points]
    else:
        pts = [[float(x) for x in row] for row in c.points]
    return {"name": c.name, "B": c.B, "field": c.field, "points": pts, "normalize": True}


def from_dict(d: dict) -> Constellation:
    field = d["field"]
    if field not in ("real", "complex"):
        raise ValueError(f"field must be 'real' or 'complex', got {field!r}")
    B = int(d["B"])
    raw = d["points"]
    if field == "complex":
        pts = np.array([[complex(p[0], p[1]) for p in row] for row in raw])
    else:
        pts = np.array(raw, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != B:
        raise ValueError(f"points do not match B={B}")
    if not d.get("normalize", True):
        e = float(np.mean(np.abs(pts) ** 2))
        if abs(e - 1.0) > 1e-9:
            raise ValueError("normalize=false requires unit per-component energy")
    return make_constellation(d["name"], pts, field)


def load_file(path) -> Constellation:
    with open(path) as fh:
        return from_dict(json.load(fh))
