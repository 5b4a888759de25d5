"""Outage probability, fading-space boundaries, anchors, and hypersphere bounds.

The fading point alpha lives in the positive orthant of R^B; the outage
region is where the per-use mutual information falls below the rate R.
Deterministic outage for B=2 integrates the traced boundary radius in
polar coordinates against the unit-Rayleigh density; Monte Carlo counts
threshold crossings of an interpolated MI surface cached on an
SNR-invariant grid of scaled fading gains.  The axis anchor alpha_o and
the ergodic anchor alpha_e give the radii of the outer and inner
hypersphere bounds.
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import precoders
from .constellations import Constellation, project
from .mutual_info import (
    DEFAULT_CONFIG,
    EngineConfig,
    SaturationError,
    inv_mi_scalar,
    mi_per_use_batch,
)
from .precoders import Precoder
from .search import solve_increasing

Z95 = 1.959963984540054
RAY_CAP_TOL = 1e-9


@dataclass(frozen=True)
class OutageQuery:
    """One outage evaluation: constellation, precoder, rate R (bpcu), SNR."""

    omega_z: Constellation
    precoder: Precoder
    R: float
    gamma: float
    fading: str = "rayleigh_unit"

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("R must be positive")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.fading != "rayleigh_unit":
            raise ValueError(f"unsupported fading law {self.fading!r}")
        if self.precoder.B != self.omega_z.B:
            raise ValueError("precoder and constellation dimensions differ")

    def omega_x(self) -> Constellation:
        return precoders.apply(self.precoder, self.omega_z)


@dataclass(frozen=True)
class OutageAnchors:
    """Axis and ergodic-line crossings of the outage boundary."""

    alpha_o: float
    alpha_o_exists: bool
    alpha_e: float
    alpha_e_exists: bool
    note: str = ""


@dataclass(frozen=True)
class OutageResult:
    p_out: float
    ci95: tuple
    method: str
    samples: int
    seed: "int | None" = None
    p_up: "float | None" = None
    p_low: "float | None" = None


@dataclass(frozen=True)
class BoundaryTrace:
    """Boundary radius rho(lambda) on a uniform angle grid over [0, pi/2].

    `saturated[k]` marks rays whose MI stays below R at every radius; their
    rho is +inf and the whole ray belongs to the outage region.
    """

    lambdas: np.ndarray
    rhos: np.ndarray
    saturated: np.ndarray
    R: float
    gamma: float


def sample_rayleigh(rng: np.random.Generator, n: int, B: int) -> np.ndarray:
    """Unit-power Rayleigh gains, E[alpha^2] = 1, shape (n, B)."""
    return np.sqrt(rng.exponential(1.0, size=(n, B)))


def wilson_ci(k: int, n: int, z: float = Z95) -> tuple:
    """95% Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(center - half, 0.0), min(center + half, 1.0))


def compute_anchors(q: OutageQuery, cfg: EngineConfig = DEFAULT_CONFIG) -> OutageAnchors:
    """Solve for alpha_o on the axis and alpha_e on the ergodic line.

    alpha_o comes from the inverse scalar MI of the axis projection at
    B*R bits; alpha_e from bisection of the full vector MI along the
    equal-gains ray at R bits per use.
    """
    omega_x = q.omega_x()
    B = omega_x.B
    note = ""
    sp = project(omega_x, 1)
    try:
        s_star = inv_mi_scalar(sp, B * q.R, cfg)
        alpha_o = math.sqrt(s_star / q.gamma)
        alpha_o_exists = True
    except SaturationError as exc:
        alpha_o, alpha_o_exists = math.inf, False
        note = str(exc)

    cap = omega_x.m / B
    if q.R >= cap - 1e-12:
        alpha_e, alpha_e_exists = math.inf, False
        note = (note + "; " if note else "") + f"R >= alphabet limit m/B = {cap:.6g}"
    else:
        ones = np.ones(B)

        def f(c):
            return float(mi_per_use_batch(omega_x, (c * ones)[None, :], q.gamma, cfg)[0])

        alpha_e = solve_increasing(f, q.R, x_start=0.05, rel_tol=1e-6)
        alpha_e_exists = True
    return OutageAnchors(alpha_o, alpha_o_exists, alpha_e, alpha_e_exists, note)


def gaussian_anchors(B: int, R: float, gamma: float) -> OutageAnchors:
    """Closed-form anchors for an i.i.d. Gaussian input alphabet."""
    alpha_o = math.sqrt((4.0 ** (B * R) - 1.0) / (2.0 * gamma))
    alpha_e = math.sqrt((4.0**R - 1.0) / (2.0 * gamma))
    return OutageAnchors(alpha_o, True, alpha_e, True)


def _ray_cap_bits(points: np.ndarray, direction: np.ndarray, M: int) -> float:
    """Large-radius MI limit along a ray: entropy of the merged faded points."""
    t = points * direction
    groups = []
    counts = []
    for row in t:
        for g, _ in enumerate(groups):
            if np.sum(np.abs(row - groups[g]) ** 2) <= RAY_CAP_TOL**2:
                counts[g] += 1
                break
        else:
            groups.append(row)
            counts.append(1)
    p = np.asarray(counts, dtype=float) / M
    return float(-np.sum(p * np.log2(p)))


def _vector_bisect_rays(mi_batch, dirs, R, rel_tol=1e-4, max_doublings=60):
    """Per-ray radius where MI crosses R, bisected simultaneously for all rays."""
    n = dirs.shape[0]
    lo = np.zeros(n)
    hi = np.ones(n)
    for _ in range(max_doublings):
        vals = mi_batch(dirs * hi[:, None])
        low = vals < R
        if not low.any():
            break
        lo[low] = hi[low]
        hi[low] *= 2.0
    else:
        raise RuntimeError("ray bracketing failed despite a cap above R")
    while np.max((hi - lo) / hi) > rel_tol:
        mid = 0.5 * (lo + hi)
        vals = mi_batch(dirs * mid[:, None])
        below = vals < R
        lo[below] = mid[below]
        hi[~below] = mid[~below]
    return 0.5 * (lo + hi)


def trace_boundary_2d(
    q: OutageQuery, n_angles: int = 513, cfg: EngineConfig = DEFAULT_CONFIG
) -> BoundaryTrace:
    """Outage boundary rho(lambda) for B=2 on a uniform grid over [0, pi/2]."""
    omega_x = q.omega_x()
    if omega_x.B != 2:
        raise ValueError("boundary tracing is defined for B = 2")
    lambdas = np.linspace(0.0, math.pi / 2.0, n_angles)
    dirs = np.stack([np.cos(lambdas), np.sin(lambdas)], axis=1)
    caps = np.array(
        [_ray_cap_bits(omega_x.points, d, omega_x.M) / omega_x.B for d in dirs]
    )
    saturated = caps <= q.R + 1e-12
    rhos = np.full(n_angles, math.inf)
    active = ~saturated
    if active.any():
        mi_batch = lambda alphas: mi_per_use_batch(omega_x, alphas, q.gamma, cfg)
        rhos[active] = _vector_bisect_rays(mi_batch, dirs[active], q.R)
    return BoundaryTrace(lambdas, rhos, saturated, q.R, q.gamma)


def gaussian_boundary_2d(R: float, gamma: float, n_angles: int = 513) -> BoundaryTrace:
    """Outage boundary for an i.i.d. Gaussian input, B=2 (closed-form MI)."""
    lambdas = np.linspace(0.0, math.pi / 2.0, n_angles)
    dirs = np.stack([np.cos(lambdas), np.sin(lambdas)], axis=1)

    def mi_batch(alphas):
        return 0.5 * np.mean(np.log2(1.0 + 2.0 * gamma * alphas**2), axis=1)

    rhos = _vector_bisect_rays(mi_batch, dirs, R)
    return BoundaryTrace(lambdas, rhos, np.zeros(n_angles, dtype=bool), R, gamma)


def _radial_mass(rho: np.ndarray) -> np.ndarray:
    """P(|alpha| <= rho) restricted to a ray, unit-Rayleigh gains, B=2:
    1 - (1 + rho^2) exp(-rho^2), computed stably for small rho."""
    r2 = rho**2
    return -np.expm1(-r2) - r2 * np.exp(-r2)


def _simpson(y: np.ndarray, h: float) -> float:
    n = y.shape[0]
    if n < 3 or n % 2 == 0:
        raise ValueError("Simpson integration needs an odd number of points")
    acc = y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()
    return float(acc * h / 3.0)


def outage_from_boundary_2d(trace: BoundaryTrace) -> OutageResult:
    """Deterministic outage probability from a 2-D boundary trace.

    Polar integration: each ray contributes its radial Rayleigh mass up to
    rho(lambda) (all of it for saturated rays), weighted by sin(2*lambda).
    """
    n = trace.lambdas.shape[0]
    if n < 65:
        raise ValueError("boundary trace needs at least 65 angles for integration")
    if n % 2 == 0:
        raise ValueError("boundary trace needs an odd number of angles (even intervals)")
    mass = np.where(trace.saturated, 1.0, _radial_mass(np.where(trace.saturated, 0.0, trace.rhos)))
    g = np.sin(2.0 * trace.lambdas) * mass
    h = trace.lambdas[1] - trace.lambdas[0]
    p = min(max(_simpson(g, h), 0.0), 1.0)
    return OutageResult(p_out=p, ci95=(p, p), method="boundary_integration", samples=n)


def chi_square_cdf(x: float, B: int) -> float:
    """P(sum of B squared unit-Rayleigh gains < x).

    Equals 1 - exp(-x) * sum_{k<B} x^k/k!; evaluated through the tail
    series for small x to avoid cancellation.  Always <= x^B.
    """
    if B < 1:
        raise ValueError("B must be >= 1")
    if x < 0:
        raise ValueError("x must be >= 0")
    if x == 0.0:
        return 0.0
    if x < 1.0:
        term = x**B / math.factorial(B)
        if term == 0.0:  # x**B underflowed
            return 0.0
        total = term
        k = B + 1
        while True:
            term *= x / k
            total += term
            if term <= 1e-18 * total:
                break
            k += 1
        return math.exp(-x) * total
    head = sum(x**k / math.factorial(k) for k in range(B))
    return 1.0 - math.exp(-x) * head


def hypersphere_bounds(anchors: OutageAnchors, B: int) -> tuple:
    """(p_up, p_low): chi-square mass of the outer/inner hyperspheres.

    Missing alpha_o means the outer sphere is unbounded: p_up = 1.
    Missing alpha_e leaves only the trivial lower bound: p_low = 0.
    """
    p_up = chi_square_cdf(anchors.alpha_o**2, B) if anchors.alpha_o_exists else 1.0
    p_low = chi_square_cdf(B * anchors.alpha_e**2, B) if anchors.alpha_e_exists else 0.0
    return p_up, p_low


class CacheAccuracyError(RuntimeError):
    """Interpolated MI surface failed its validation tolerance."""


class PolarMICache:
    """Per-use MI interpolated on a gamma-free grid of scaled fading gains.

    The MI at fading point alpha and SNR gamma depends only on the scaled
    gains u = sqrt(2*gamma)*alpha, so the surface is tabulated once in
    u-space and then serves every SNR.  B=2 uses polar coordinates
    (angle, |u|); B=3 uses a cube over v_b = log(1+u_b), whose axis-aligned
    resolution tracks the narrow near-axis structure that a spherical grid
    would need quadratically many directions to resolve.  Interpolation is
    separable Catmull-Rom.

    Lookups beyond the grid exploit monotonicity (MI never decreases when
    any gain grows): the clamped-edge value is a lower bound, so a
    threshold comparison is already settled unless that bound lies below
    the threshold; only those samples fall back to direct evaluation.
    Construction validates against direct evaluation at random points
    (refining the grid once if needed) so the interpolation error stays
    below `tol_bits`.
    """

    def __init__(
        self,
        omega_x: Constellation,
        cfg: EngineConfig = DEFAULT_CONFIG,
        n_dir: "int | None" = None,
        n_rad: "int | None" = None,
        n_axis: "int | None" = None,
        u_max: "float | None" = None,
        build_order: "int | None" = None,
        validate: bool = True,
        n_validate: int = 1000,
        tol_bits: float = 1e-3,
        seed: int = 0,
    ):
        B = omega_x.B
        if B not in (2, 3):
            raise ValueError("the MI cache supports B in {2, 3}")
        self.omega_x = omega_x
        self.B = B
        self.u_max = u_max if u_max is not None else (21.0 if B == 2 else 15.0)
        if build_order is None:
            build_order = min(cfg.gh_order, 20) if B == 2 else min(cfg.gh_order, 10)
        self.cfg = replace(cfg, gh_order=build_order)
        if B == 2:
            self._sizes = [n_dir or 193, n_rad or 161]
        else:
            self._sizes = [n_axis or 33] * 3
        self._build()
        if validate:
            err = self._validate(n_validate, seed)
            if err > tol_bits:
                self._sizes = [2 * (n - 1) + 1 for n in self._sizes]
                self._build()
                err = self._validate(n_validate, seed + 1)
                if err > tol_bits:
                    raise CacheAccuracyError(
                        f"interpolation error {err:.2e} bits exceeds {tol_bits:.1e}"
                    )
            self.validation_error_bits = err

    def _build(self):
        if self.B == 2:
            self.grids = [
                np.linspace(0.0, math.pi / 2.0, self._sizes[0]),
                np.linspace(0.0, self.u_max, self._sizes[1]),
            ]
            lam, u = np.meshgrid(*self.grids, indexing="ij")
            scaled = np.stack([u * np.cos(lam), u * np.sin(lam)], axis=-1).reshape(-1, 2)
        else:
            v_max = math.log1p(self.u_max)
            self.grids = [np.linspace(0.0, v_max, n) for n in self._sizes]
            mesh = np.meshgrid(*self.grids, indexing="ij")
            scaled = np.expm1(np.stack([m.ravel() for m in mesh], axis=-1))
        # alpha = u/sqrt(2) at gamma = 1 reproduces any (alpha, gamma) pair
        vals = mi_per_use_batch(self.omega_x, scaled / math.sqrt(2.0), 1.0, self.cfg)
        self.values = vals.reshape(self._sizes)

    def _coords(self, scaled):
        """Warped grid coordinates, inside mask, and edge-clamped coords."""
        if self.B == 2:
            u = np.sqrt(np.sum(scaled**2, axis=1))
            lam = np.clip(np.arctan2(scaled[:, 1], scaled[:, 0]), 0.0, math.pi / 2.0)
            inside = u <= self.u_max
            return [lam, np.minimum(u, self.u_max)], inside
        v = np.log1p(scaled)
        v_max = self.grids[0][-1]
        inside = (v <= v_max).all(axis=1)
        v = np.minimum(v, v_max)
        return [v[:, 0], v[:, 1], v[:, 2]], inside

    def mi(self, alphas: np.ndarray, gamma: float, threshold: "float | None" = None) -> np.ndarray:
        """Per-use MI at each fading point (rows of `alphas`) at SNR gamma.

        Out-of-grid points take the clamped-edge value when that already
        settles a comparison against `threshold`, and are evaluated
        directly otherwise.  With no threshold every out-of-grid point is
        evaluated directly.
        """
        alphas = np.asarray(alphas, dtype=float)
        scaled = alphas * math.sqrt(2.0 * gamma)
        coords, inside = self._coords(scaled)
        out = self._interp(coords)
        overflow = ~inside
        if overflow.any():
            if threshold is None:
                direct = overflow
            else:
                direct = overflow & (out < threshold)
            if direct.any():
                out[direct] = mi_per_use_batch(
                    self.omega_x, alphas[direct], gamma, self.cfg
                )
        return out

    @staticmethod
    def _cr_weights(t):
        # Catmull-Rom basis at fraction t, taps at offsets -1, 0, 1, 2
        t2 = t * t
        t3 = t2 * t
        return (
            -0.5 * t3 + t2 - 0.5 * t,
            1.5 * t3 - 2.5 * t2 + 1.0,
            -1.5 * t3 + 2.0 * t2 + 0.5 * t,
            0.5 * t3 - 0.5 * t2,
        )

    def _interp(self, coords):
        """Separable cubic interpolation on the uniform warped grid."""
        idxs, wlists = [], []
        for grid, x in zip(self.grids, coords):
            step = grid[1] - grid[0]
            idx = np.clip((x / step).astype(int), 0, grid.shape[0] - 2)
            frac = np.clip((x - grid[idx]) / step, 0.0, 1.0)
            idxs.append(idx)
            wlists.append(self._cr_weights(frac))
        ndim = len(self.grids)
        out = np.zeros(coords[0].shape[0])
        for offsets in np.ndindex(*([4] * ndim)):
            w = wlists[0][offsets[0]].copy()
            gather = [np.clip(idxs[0] - 1 + offsets[0], 0, self.grids[0].shape[0] - 1)]
            for d in range(1, ndim):
                w *= wlists[d][offsets[d]]
                gather.append(
                    np.clip(idxs[d] - 1 + offsets[d], 0, self.grids[d].shape[0] - 1)
                )
            out += w * self.values[tuple(gather)]
        return out

    def _validate(self, n_validate, seed):
        rng = np.random.default_rng(seed)
        if self.B == 2:
            dirs = rng.normal(size=(n_validate, 2))
            dirs = np.abs(dirs) / np.linalg.norm(dirs, axis=1, keepdims=True)
            u = rng.uniform(0.0, 0.98 * self.u_max, n_validate)
            scaled = dirs * u[:, None]
        else:
            scaled = rng.uniform(0.0, 0.98 * self.u_max, (n_validate, 3))
        alphas = scaled / math.sqrt(2.0)
        direct = mi_per_use_batch(self.omega_x, alphas, 1.0, self.cfg)
        interp = self.mi(alphas, 1.0)
        return float(np.max(np.abs(direct - interp)))


def outage_mc(
    q: OutageQuery,
    n: int,
    seed: int = 0,
    cfg: EngineConfig = DEFAULT_CONFIG,
    cache: "PolarMICache | None" = None,
    cache_kwargs: "dict | None" = None,
) -> OutageResult:
    """Monte Carlo outage probability with a Wilson 95% interval.

    Draws n i.i.d. unit-Rayleigh fading vectors and counts per-use MI
    below R.  For B in {2, 3} the MI comes from a polar interpolation
    cache; other dimensions evaluate directly (slow for large n).
    """
    if n < 1000:
        raise ValueError("outage_mc needs n >= 1000")
    omega_x = q.omega_x()
    B = omega_x.B
    if q.R >= omega_x.m / B - 1e-12:
        warnings.warn("R is at or above the alphabet limit m/B; outage is certain")
        return OutageResult(1.0, (1.0, 1.0), "mc", n, seed=seed)
    rng = np.random.default_rng(seed)
    alphas = sample_rayleigh(rng, n, B)
    if B in (2, 3):
        if cache is None:
            cache = PolarMICache(omega_x, cfg, **(cache_kwargs or {}))
        mi = cache.mi(alphas, q.gamma, threshold=q.R)
    else:
        mi = mi_per_use_batch(omega_x, alphas, q.gamma, cfg)
    k = int(np.count_nonzero(mi < q.R))
    return OutageResult(p_out=k / n, ci95=wilson_ci(k, n), method="mc", samples=n, seed=seed)


@dataclass(frozen=True)
class DiversityReport:
    gammas: np.ndarray
    p_up: np.ndarray
    slope_top_decade: float


def diversity_bound(q: OutageQuery, gammas, cfg: EngineConfig = DEFAULT_CONFIG) -> DiversityReport:
    """Upper-bound outage p_up(gamma) and its high-SNR log-log slope.

    The axis-crossing SNR s* = alpha_o^2 * gamma is rate- and geometry-
    determined, so p_up(gamma) = chi_square_cdf(s*/gamma, B); the slope
    approaches -B when the projection can carry B*R bits.  Raises
    SaturationError (diversity loss) otherwise.
    """
    gammas = np.asarray(sorted(gammas), dtype=float)
    omega_x = q.omega_x()
    sp = project(omega_x, 1)
    try:
        s_star = inv_mi_scalar(sp, omega_x.B * q.R, cfg)
    except SaturationError as exc:
        raise SaturationError(
            f"diversity loss: {exc} (outage decays slower than gamma^-{omega_x.B})"
        ) from exc
    p_up = np.array([chi_square_cdf(s_star / g, omega_x.B) for g in gammas])
    top = gammas >= gammas.max() / 10.0
    slope = float(np.polyfit(np.log10(gammas[top]), np.log10(p_up[top]), 1)[0])
    return DiversityReport(gammas=gammas, p_up=p_up, slope_top_decade=slope)
