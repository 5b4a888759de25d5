"""Precoder parameter sweeps and upper-bound-driven optimization.

The criterion is the axis-crossing SNR per symbol gamma_s: the scalar SNR
at which the one-axis projection of the precoded constellation carries
B*R bits.  Minimizing gamma_s shrinks the outer hypersphere and with it
the outage upper bound; it depends only on (constellation, angle, B*R),
never on the average SNR.  The ergodic anchor is insensitive to
orthogonal transformations, so it is reported but not optimized: only
constellation expansion moves the inner bound.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import precoders
from .constellations import Constellation, min_product_distance, project
from .mutual_info import (
    DEFAULT_CONFIG,
    EngineConfig,
    SaturationError,
    inv_mi_scalar,
    mi_per_use_batch,
)
from .search import golden_min, solve_increasing


def gaussian_floor(B: int, R: float, field: str = "real") -> float:
    """Least scalar SNR at which a Gaussian input carries B*R bits."""
    if field == "real":
        return (2.0 ** (2 * B * R) - 1.0) / 2.0
    if field == "complex":
        return 2.0 ** (B * R) - 1.0
    raise ValueError(f"unknown field {field!r}")


def gaussian_ergodic_floor(R: float, field: str = "real") -> float:
    """Least per-block SNR at which a Gaussian input carries R bits per use."""
    if field == "real":
        return (2.0 ** (2 * R) - 1.0) / 2.0
    if field == "complex":
        return 2.0**R - 1.0
    raise ValueError(f"unknown field {field!r}")


@dataclass(frozen=True)
class SweepProfile:
    param_name: str
    grid: np.ndarray  # radians
    gamma_s: np.ndarray  # linear SNR per grid point, inf where saturated
    gamma_floor: float  # linear
    d_pmin: "np.ndarray | None" = None

    @property
    def grid_deg(self) -> np.ndarray:
        return np.degrees(self.grid)

    @property
    def saturated(self) -> np.ndarray:
        return ~np.isfinite(self.gamma_s)


@dataclass(frozen=True)
class OptimizeResult:
    theta_opt: float  # radians
    gamma_s_opt: float  # linear
    near_optimal_interval: tuple  # degrees (lo, hi)
    intervals: list  # all near-optimal intervals, degrees
    profile: SweepProfile


def _make_precoder(B: int, theta: float):
    if B == 2:
        return precoders.rotation2(theta)
    if B == 3:
        return precoders.rotation3(theta)
    raise ValueError("single-angle sweeps cover B = 2 and B = 3 only")


def default_grid(B: int, step_deg: float = 0.5) -> np.ndarray:
    hi = 90.0 if B == 2 else 120.0
    return np.radians(np.arange(0.0, hi + step_deg / 2, step_deg))


def gamma_s_at(omega_z: Constellation, B: int, R: float, theta: float,
               cfg: EngineConfig = DEFAULT_CONFIG) -> float:
    """Axis-crossing SNR for one angle; inf when the rate saturates."""
    omega_x = precoders.apply(_make_precoder(B, theta), omega_z)
    sp = project(omega_x, 1)
    try:
        return inv_mi_scalar(sp, B * R, cfg)
    except SaturationError:
        return math.inf


def sweep(
    omega_z: Constellation,
    B: int,
    R: float,
    grid: "np.ndarray | None" = None,
    cfg: EngineConfig = DEFAULT_CONFIG,
    include_product_distance: bool = False,
    workers: int = 1,
) -> SweepProfile:
    """gamma_s over an angle grid, plus the Gaussian floor it cannot beat."""
    if omega_z.B != B:
        raise ValueError(f"constellation has B={omega_z.B}, expected {B}")
    if grid is None:
        grid = default_grid(B)
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")

    def one(theta):
        return gamma_s_at(omega_z, B, R, theta, cfg)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            gamma_s = np.array(list(pool.map(one, grid)))
    else:
        gamma_s = np.array([one(t) for t in grid])
    if not np.isfinite(gamma_s).any():
        raise SaturationError(
            f"rate R={R} is infeasible for {omega_z.name}: every angle saturates"
        )
    d_pmin = None
    if include_product_distance:
        d_pmin = product_distance_profile(omega_z, B, grid)
    name = "theta" if B == 2 else "theta1"
    return SweepProfile(
        param_name=name,
        grid=grid,
        gamma_s=gamma_s,
        gamma_floor=gaussian_floor(B, R, omega_z.field),
        d_pmin=d_pmin,
    )


def optimize(
    omega_z: Constellation,
    B: int,
    R: float,
    cfg: EngineConfig = DEFAULT_CONFIG,
    coarse_step_deg: float = 0.5,
    refine_tol_deg: float = 0.05,
    interval_db: float = 0.05,
    workers: int = 1,
) -> OptimizeResult:
    """Minimize gamma_s: coarse grid plus golden-section refinement.

    The reported near-optimal interval is the contiguous grid region
    around the minimum staying within `interval_db` of it; disjoint ties
    are all listed in `intervals`.
    """
    profile = sweep(omega_z, B, R, default_grid(B, coarse_step_deg), cfg, workers=workers)
    i_min = int(np.nanargmin(np.where(profile.saturated, np.nan, profile.gamma_s)))
    lo = profile.grid[max(i_min - 1, 0)]
    hi = profile.grid[min(i_min + 1, len(profile.grid) - 1)]

    def f(theta):
        g = gamma_s_at(omega_z, B, R, theta, cfg)
        return g if math.isfinite(g) else 1e300

    theta_opt = golden_min(f, lo, hi, math.radians(refine_tol_deg))
    gamma_s_opt = f(theta_opt)
    if gamma_s_opt > profile.gamma_s[i_min]:
        theta_opt, gamma_s_opt = float(profile.grid[i_min]), float(profile.gamma_s[i_min])

    thresh_db = 10.0 * math.log10(gamma_s_opt) + interval_db
    ok = np.where(
        profile.saturated, False, 10.0 * np.log10(np.where(profile.saturated, 1.0, profile.gamma_s)) <= thresh_db
    )
    intervals = []
    start = None
    deg = profile.grid_deg
    for k, flag in enumerate(ok):
        if flag and start is None:
            start = k
        if (not flag or k == len(ok) - 1) and start is not None:
            end = k if flag else k - 1
            intervals.append((float(deg[start]), float(deg[end])))
            start = None
    own = next(
        (iv for iv in intervals if iv[0] - 1e-9 <= math.degrees(theta_opt) <= iv[1] + 1e-9),
        intervals[0] if intervals else (math.degrees(theta_opt), math.degrees(theta_opt)),
    )
    return OptimizeResult(
        theta_opt=float(theta_opt),
        gamma_s_opt=float(gamma_s_opt),
        near_optimal_interval=own,
        intervals=intervals,
        profile=profile,
    )


def ergodic_snr(omega_z: Constellation, B: int, R: float,
                cfg: EngineConfig = DEFAULT_CONFIG) -> float:
    """Per-block SNR alpha_e^2*gamma at which the equal-gains MI reaches R.

    Independent of the precoding angle (orthogonal transformations keep
    all pairwise distances), so it is computed without a precoder.
    """
    cap = omega_z.m / B
    if R >= cap - 1e-12:
        raise SaturationError(f"R={R} is at or above the alphabet limit m/B={cap:.6g}")
    ones = np.ones(B)

    def f(c):
        return float(mi_per_use_batch(omega_z, (c * ones)[None, :], 1.0, cfg)[0])

    c_star = solve_increasing(f, R, x_start=0.05, rel_tol=1e-6)
    return c_star**2


@dataclass(frozen=True)
class ExpansionRow:
    name: str
    m: float
    Rc: float
    theta_opt_deg: float
    gamma_s_opt: float
    gap_db: float
    ergodic_snr: float
    ergodic_gap_db: float


def expansion_compare(candidates, B: int, R: float,
                      cfg: EngineConfig = DEFAULT_CONFIG) -> list:
    """Optimize each (constellation, Rc) candidate at the common rate R.

    Candidates must satisfy R = Rc * m / B with m >= ceil(B*R); the gap
    columns measure distance to the Gaussian floors in dB.
    """
    rows = []
    for omega_z, Rc in candidates:
        m = omega_z.m
        if abs(R - Rc * m / B) > 1e-9:
            raise ValueError(
                f"{omega_z.name}: Rc*m/B = {Rc * m / B:.6g} does not match R = {R:.6g}"
            )
        if m < math.ceil(B * R) - 1e-9:
            raise ValueError(
                f"{omega_z.name}: m={m:.6g} below the minimum ceil(B*R)={math.ceil(B * R)}"
            )
        res = optimize(omega_z, B, R, cfg)
        floor = gaussian_floor(B, R, omega_z.field)
        se = ergodic_snr(omega_z, B, R, cfg)
        se_floor = gaussian_ergodic_floor(R, omega_z.field)
        rows.append(
            ExpansionRow(
                name=omega_z.name,
                m=m,
                Rc=Rc,
                theta_opt_deg=math.degrees(res.theta_opt),
                gamma_s_opt=res.gamma_s_opt,
                gap_db=10.0 * math.log10(res.gamma_s_opt / floor),
                ergodic_snr=se,
                ergodic_gap_db=10.0 * math.log10(se / se_floor),
            )
        )
    return rows


def product_distance_profile(omega_z: Constellation, B: int, grid) -> np.ndarray:
    """Minimum product distance of the precoded constellation per angle."""
    if B not in (2, 3):
        raise ValueError("product-distance profiles cover B = 2 and B = 3")
    grid = np.asarray(grid, dtype=float)
    out = np.empty(grid.shape[0])
    for k, theta in enumerate(grid):
        omega_x = precoders.apply(_make_precoder(B, theta), omega_z)
        out[k] = min_product_distance(omega_x)
    return out
