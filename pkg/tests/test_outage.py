import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outagelab import constellations as cs
from outagelab import precoders as pc
from outagelab.mutual_info import ChannelSample, EngineConfig, SaturationError, mi_per_use
from outagelab.outage import (
    BoundaryTrace,
    OutageAnchors,
    OutageQuery,
    PolarMICache,
    chi_square_cdf,
    compute_anchors,
    diversity_bound,
    gaussian_anchors,
    gaussian_boundary_2d,
    hypersphere_bounds,
    outage_from_boundary_2d,
    outage_mc,
    sample_rayleigh,
    trace_boundary_2d,
    wilson_ci,
)

CHI2_1_2 = 0.264241117657115  # 1 - 2/e


@pytest.fixture(scope="module")
def q27(gamma_8db):
    return OutageQuery(
        cs.build_named("r2_4"), pc.rotation2(math.radians(27)), R=0.9, gamma=gamma_8db
    )


def chi2_pdf_integral_oracle(x, B, n=200_001):
    """Quadrature of the Gamma(B,1) density, independent of the CDF formula."""
    t = np.linspace(0.0, x, n)
    pdf = t ** (B - 1) * np.exp(-t) / math.factorial(B - 1)
    return float(np.trapezoid(pdf, t))


def test_chi_square_cdf_cases():
    assert chi_square_cdf(0.0, 2) == 0.0
    for x in (0.3, 1.0, 4.0):
        assert chi_square_cdf(x, 1) == pytest.approx(1 - math.exp(-x), abs=1e-14)
    assert chi_square_cdf(1.0, 2) == pytest.approx(CHI2_1_2, abs=1e-14)
    for B in (2, 3):
        for x in (0.05, 0.5, 0.999, 1.001, 2.5, 10.0):
            assert chi_square_cdf(x, B) == pytest.approx(
                chi2_pdf_integral_oracle(x, B), abs=1e-8
            )


def test_chi_square_empirical(cfg):
    rng = np.random.default_rng(123)
    n = 2_000_000
    for B in (2, 3):
        sums = rng.exponential(1.0, (n, B)).sum(axis=1)
        for x in (0.5, 1.0, 2.0):
            emp = np.count_nonzero(sums < x) / n
            sd = math.sqrt(emp * (1 - emp) / n)
            assert abs(chi_square_cdf(x, B) - emp) < 3 * sd


@given(x=st.floats(min_value=0.0, max_value=50.0), B=st.integers(1, 6))
@settings(max_examples=80, deadline=None)
def test_chi_square_below_power_bound(x, B):
    assert chi_square_cdf(x, B) <= x**B + 1e-15


def test_wilson_ci_contains_point():
    lo, hi = wilson_ci(50, 1000)
    assert lo < 0.05 < hi
    assert wilson_ci(0, 100)[0] == pytest.approx(0.0, abs=1e-12)
    assert wilson_ci(100, 100)[1] == pytest.approx(1.0, abs=1e-12)


def test_gaussian_anchor_formulas(gamma_8db):
    an = gaussian_anchors(2, 0.9, gamma_8db)
    assert an.alpha_o**2 == pytest.approx((4**1.8 - 1) / (2 * gamma_8db))
    assert an.alpha_e**2 == pytest.approx((4**0.9 - 1) / (2 * gamma_8db))
    # the traced gaussian boundary hits the anchors at its ends
    tr = gaussian_boundary_2d(0.9, gamma_8db, 129)
    assert tr.rhos[0] == pytest.approx(an.alpha_o, rel=1e-3)
    assert tr.rhos[64] == pytest.approx(math.sqrt(2) * an.alpha_e, rel=1e-3)


def test_anchor_consistency(q27, cfg):
    an = compute_anchors(q27, cfg)
    assert an.alpha_o_exists and an.alpha_e_exists
    omega_x = q27.omega_x()
    for alpha in ([an.alpha_o, 0.0], [0.0, an.alpha_o], [an.alpha_e, an.alpha_e]):
        got = mi_per_use(omega_x, ChannelSample(np.array(alpha), q27.gamma), cfg).value
        assert got == pytest.approx(0.9, abs=1e-5)


def test_anchor_saturation_flags(cfg, gamma_8db):
    q0 = OutageQuery(cs.build_named("r2_4"), pc.rotation2(0.0), R=0.9, gamma=gamma_8db)
    an = compute_anchors(q0, cfg)
    assert not an.alpha_o_exists and math.isinf(an.alpha_o)
    assert an.alpha_e_exists
    assert "projection" in an.note


def test_trace_endpoints_and_ergodic_point(q27, cfg):
    an = compute_anchors(q27, cfg)
    tr = trace_boundary_2d(q27, 129, cfg)
    assert tr.rhos[0] == pytest.approx(an.alpha_o, rel=1e-3)
    assert tr.rhos[-1] == pytest.approx(an.alpha_o, rel=1e-3)
    assert tr.rhos[64] == pytest.approx(math.sqrt(2) * an.alpha_e, rel=1e-3)
    assert not tr.saturated.any()


def test_trace_theta0_has_saturated_axes(cfg, gamma_8db):
    q0 = OutageQuery(cs.build_named("r2_4"), pc.rotation2(0.0), R=0.9, gamma=gamma_8db)
    tr = trace_boundary_2d(q0, 129, cfg)
    assert tr.saturated[0] and tr.saturated[-1]
    assert not tr.saturated[64]
    assert math.isinf(tr.rhos[0])


def test_outage_from_boundary_degenerate_traces():
    n = 129
    lam = np.linspace(0, math.pi / 2, n)
    zero = BoundaryTrace(lam, np.zeros(n), np.zeros(n, bool), 0.5, 1.0)
    assert outage_from_boundary_2d(zero).p_out == pytest.approx(0.0, abs=1e-15)
    full = BoundaryTrace(lam, np.full(n, math.inf), np.ones(n, bool), 0.5, 1.0)
    assert outage_from_boundary_2d(full).p_out == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        outage_from_boundary_2d(
            BoundaryTrace(lam[:51], np.zeros(51), np.zeros(51, bool), 0.5, 1.0)
        )
    with pytest.raises(ValueError):
        outage_from_boundary_2d(
            BoundaryTrace(lam[:100], np.zeros(100), np.zeros(100, bool), 0.5, 1.0)
        )


def test_boundary_integration_doubling_stable(q27, cfg):
    p_lo = outage_from_boundary_2d(trace_boundary_2d(q27, 257, cfg)).p_out
    p_hi = outage_from_boundary_2d(trace_boundary_2d(q27, 513, cfg)).p_out
    assert abs(p_hi - p_lo) / p_hi < 0.01


def test_outage_mc_seeds_agree(q27, cfg):
    a = outage_mc(q27, 100_000, seed=1, cfg=cfg)
    b = outage_mc(q27, 100_000, seed=2, cfg=cfg)
    half = (a.ci95[1] - a.ci95[0]) / 2 + (b.ci95[1] - b.ci95[0]) / 2
    assert abs(a.p_out - b.p_out) < half
    again = outage_mc(q27, 100_000, seed=1, cfg=cfg)
    assert again.p_out == a.p_out


def test_outage_mc_rate_above_capacity(cfg, gamma_8db):
    q = OutageQuery(cs.build_named("r2_4"), pc.rotation2(0.3), R=1.5, gamma=gamma_8db)
    with pytest.warns(UserWarning):
        res = outage_mc(q, 10_000, seed=0, cfg=cfg)
    assert res.p_out == 1.0


def test_outage_mc_needs_min_samples(q27, cfg):
    with pytest.raises(ValueError):
        outage_mc(q27, 100, seed=0, cfg=cfg)


def test_gaussian_outage_lower_bounds_discrete(q27, cfg):
    disc = outage_from_boundary_2d(trace_boundary_2d(q27, 257, cfg)).p_out
    gauss = outage_from_boundary_2d(gaussian_boundary_2d(q27.R, q27.gamma, 257)).p_out
    assert gauss <= disc


def test_hypersphere_bounds_and_defaults(q27, cfg):
    an = compute_anchors(q27, cfg)
    p_up, p_low = hypersphere_bounds(an, 2)
    assert p_up == pytest.approx(chi_square_cdf(an.alpha_o**2, 2))
    assert p_low == pytest.approx(chi_square_cdf(2 * an.alpha_e**2, 2))
    assert 0 < p_low < p_up < 1
    none_o = OutageAnchors(math.inf, False, an.alpha_e, True)
    assert hypersphere_bounds(none_o, 2)[0] == 1.0
    none_e = OutageAnchors(an.alpha_o, True, math.inf, False)
    assert hypersphere_bounds(none_e, 2)[1] == 0.0
    zero_e = OutageAnchors(an.alpha_o, True, 0.0, True)
    assert hypersphere_bounds(zero_e, 2)[1] == 0.0


def test_bounds_coincide_when_spheres_match():
    an = OutageAnchors(math.sqrt(2) * 0.3, True, 0.3, True)
    p_up, p_low = hypersphere_bounds(an, 2)
    assert p_up == pytest.approx(p_low)


def test_cache_validates_below_tolerance(q27, cfg):
    cache = PolarMICache(q27.omega_x(), cfg)
    assert cache.validation_error_bits < 1e-3


def test_cache_serves_multiple_snrs(q27, cfg):
    from outagelab.mutual_info import mi_per_use_batch

    cache = PolarMICache(q27.omega_x(), cfg, validate=False)
    alphas = np.array([[0.4, 0.9], [1.2, 0.1], [0.7, 0.7]])
    for gamma in (0.5, q27.gamma, 40.0):
        direct = mi_per_use_batch(q27.omega_x(), alphas, gamma, cache.cfg)
        assert np.max(np.abs(cache.mi(alphas, gamma) - direct)) < 1e-3


def test_cache_out_of_range_falls_back_to_direct(q27, cfg):
    from outagelab.mutual_info import mi_per_use_batch

    cache = PolarMICache(q27.omega_x(), cfg, validate=False)
    gamma = 1000.0
    alphas = np.array([[3.0, 2.0], [0.002, 0.001]])
    got = cache.mi(alphas, gamma)  # no threshold: overflow evaluated directly
    direct = mi_per_use_batch(q27.omega_x(), alphas, gamma, cache.cfg)
    assert got[0] == pytest.approx(direct[0], abs=1e-12)
    assert got[1] == pytest.approx(direct[1], abs=1e-3)
    # with a threshold the settled overflow point keeps the edge value,
    # which already decides the comparison
    settled = cache.mi(alphas, gamma, threshold=0.9)
    assert settled[0] >= 0.9


def test_b3_outage_between_bounds(cfg, gamma_8db):
    q = OutageQuery(
        cs.build_named("r3_8"), pc.rotation3(math.radians(30)), R=0.5, gamma=gamma_8db
    )
    res = outage_mc(
        q, 20_000, seed=5, cfg=cfg,
        cache_kwargs={"n_axis": 17, "validate": False},
    )
    an = compute_anchors(q, cfg)
    p_up, p_low = hypersphere_bounds(an, 3)
    half = (res.ci95[1] - res.ci95[0]) / 2
    assert p_low - half <= res.p_out <= p_up + half


def test_diversity_bound_slopes(cfg):
    gammas = [10 ** (g / 10) for g in (20, 22, 24, 26, 28, 30)]
    q = OutageQuery(cs.build_named("r2_4"), pc.rotation2(math.radians(27)), R=0.9, gamma=1.0)
    rep = diversity_bound(q, gammas, cfg)
    assert rep.slope_top_decade == pytest.approx(-2.0, abs=0.1)
    gq = gaussian_anchors(2, 0.9, 1.0)
    # gaussian upper bound has the same -B slope by construction
    ps = [chi_square_cdf(gq.alpha_o**2 / g, 2) for g in gammas]
    slope = np.polyfit(np.log10(gammas), np.log10(ps), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.1)


def test_diversity_loss_diagnostic(cfg):
    q0 = OutageQuery(cs.build_named("r2_4"), pc.rotation2(0.0), R=0.9, gamma=1.0)
    with pytest.raises(SaturationError, match="diversity loss"):
        diversity_bound(q0, [10.0, 100.0], cfg)


def test_rayleigh_sampler_unit_power():
    rng = np.random.default_rng(0)
    a = sample_rayleigh(rng, 200_000, 2)
    assert np.mean(a**2) == pytest.approx(1.0, abs=0.01)


def test_query_validation(gamma_8db):
    with pytest.raises(ValueError):
        OutageQuery(cs.build_named("r2_4"), pc.rotation2(0.1), R=-1.0, gamma=gamma_8db)
    with pytest.raises(ValueError):
        OutageQuery(cs.build_named("r2_4"), pc.rotation2(0.1), R=0.9, gamma=0.0)
    with pytest.raises(ValueError):
        OutageQuery(cs.build_named("r3_8"), pc.rotation2(0.1), R=0.9, gamma=gamma_8db)
    with pytest.raises(ValueError):
        OutageQuery(
            cs.build_named("r2_4"), pc.rotation2(0.1), R=0.9, gamma=gamma_8db, fading="rician"
        )
