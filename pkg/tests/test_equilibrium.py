import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from chokegor.eos import PhaseLabel, fugacity_coeffs
from chokegor.equilibrium import (
    FlashState,
    SinglePhaseError,
    TrivialSolutionError,
    UnreachableEnthalpyError,
    mixture_enthalpy,
    ph_flash,
    pt_flash,
    rachford_rice,
    wilson_k,
)
from chokegor.fluids import Composition, normalize

# two-phase grid spanning 288-360 K and 1-96 bar for the six-component feed
PT_GRID = [
    (288.15, 1e5),
    (288.15, 40e5),
    (288.15, 96e5),
    (315.0, 20e5),
    (315.0, 66e5),
    (339.15, 4e5),
    (339.15, 96e5),
    (360.0, 1e5),
    (360.0, 66e5),
    (360.0, 96e5),
]


def pure(fluid, name):
    z = np.zeros(fluid.n_components)
    z[fluid.index(name)] = 1.0
    return Composition(z)


# ---------------------------------------------------------------------------
# Wilson correlation
# ---------------------------------------------------------------------------


def test_wilson_fixed_point(fluid):
    c3 = fluid.components[1]
    k = wilson_k(fluid, c3.tc, c3.pc)
    assert k[1] == pytest.approx(1.0, rel=1e-12)


def test_wilson_ordering_by_volatility(fluid):
    k = wilson_k(fluid, 339.0, 96e5)
    assert k[fluid.index("C1")] > 1.0
    assert k[fluid.index("C20")] < 1.0
    assert np.all(np.diff(k) < 0)  # lighter components are more volatile


def test_wilson_inverse_pressure_scaling(fluid):
    k1 = wilson_k(fluid, 320.0, 40e5)
    k2 = wilson_k(fluid, 320.0, 80e5)
    assert np.allclose(k2, 0.5 * k1, rtol=1e-14)


def test_wilson_positive(fluid):
    assert np.all(wilson_k(fluid, 250.0, 1e7) > 0.0)


# ---------------------------------------------------------------------------
# Rachford-Rice
# ---------------------------------------------------------------------------


def test_rachford_rice_binary_closed_form():
    beta = rachford_rice(np.array([0.5, 0.5]), np.array([2.0, 0.5]))
    assert beta == pytest.approx(0.5, abs=1e-12)


def test_rachford_rice_near_degenerate():
    beta = rachford_rice(np.array([0.9, 0.1]), np.array([1.0001, 0.9999]))
    z = np.array([0.9, 0.1])
    k = np.array([1.0001, 0.9999])
    g = np.sum(z * (k - 1) / (1 + beta * (k - 1)))
    assert abs(g) < 1e-12
    assert np.isfinite(beta)


def test_rachford_rice_spe5_feed_vs_bisection_oracle(fluid, spe5_feed):
    k = wilson_k(fluid, 339.15, 96e5)
    beta = rachford_rice(spe5_feed, k)
    ref = oracles.rachford_rice_bisect(spe5_feed.fractions, k)
    assert beta == pytest.approx(ref, abs=1e-10)
    assert beta == pytest.approx(0.38791021673076365, abs=1e-9)


def test_rachford_rice_single_phase_signals():
    with pytest.raises(SinglePhaseError):
        rachford_rice(np.array([0.5, 0.5]), np.array([2.0, 1.5]))
    with pytest.raises(SinglePhaseError):
        rachford_rice(np.array([0.5, 0.5]), np.array([0.8, 0.5]))
    with pytest.raises(TrivialSolutionError):
        rachford_rice(np.array([0.5, 0.5]), np.array([1.0, 1.0]))


@given(
    st.integers(min_value=2, max_value=6),
    st.integers(min_value=0, max_value=2**31 - 1),
)
@settings(max_examples=80, deadline=None)
def test_rachford_rice_random_vs_oracle(n, seed):
    rng = np.random.default_rng(seed)
    z = rng.dirichlet(np.ones(n))
    k = rng.lognormal(0.0, 1.2, size=n)
    if np.all(k >= 1.0) or np.all(k <= 1.0):
        return
    beta = rachford_rice(z, k)
    ref = oracles.rachford_rice_bisect(z, k)
    assert beta == pytest.approx(ref, abs=1e-9)


# ---------------------------------------------------------------------------
# PT flash
# ---------------------------------------------------------------------------


def test_pure_supercritical_single_vapor(fluid):
    zc1 = pure(fluid, "C1")
    eq = pt_flash(fluid, zc1, 300.0, 10e5)
    assert eq.state is FlashState.SINGLE_PHASE_VAPOR
    assert np.array_equal(eq.y.fractions, zc1.fractions)
    assert np.array_equal(eq.x.fractions, zc1.fractions)
    assert eq.beta == 1.0


def test_two_phase_flash_consistency(fluid, spe5_feed):
    t, p = 339.15, 66e5
    eq = pt_flash(fluid, spe5_feed, t, p)
    assert eq.state is FlashState.TWO_PHASE
    balance = np.abs(
        spe5_feed.fractions
        - eq.beta * eq.y.fractions
        - (1 - eq.beta) * eq.x.fractions
    )
    assert balance.max() < 1e-12
    lp_l = fugacity_coeffs(fluid, eq.x, t, p, PhaseLabel.LIQUID)
    lp_v = fugacity_coeffs(fluid, eq.y, t, p, PhaseLabel.VAPOR)
    mask = spe5_feed.fractions > 0
    resid = np.abs(
        np.log(eq.x.fractions[mask])
        + lp_l[mask]
        - np.log(eq.y.fractions[mask])
        - lp_v[mask]
    )
    assert resid.max() < 1e-8


def test_flash_beta_matches_independent_oracle(fluid, spe5_feed):
    t, p = 339.15, 66e5
    eq = pt_flash(fluid, spe5_feed, t, p)
    ref = oracles.ss_flash(*oracles.arrays_of(fluid), spe5_feed.fractions, t, p)
    assert ref is not None
    beta_ref, x_ref, y_ref = ref
    assert eq.beta == pytest.approx(beta_ref, abs=1e-8)
    assert np.allclose(eq.x.fractions, x_ref, atol=1e-8)
    assert np.allclose(eq.y.fractions, y_ref, atol=1e-8)


def test_flash_grid_material_balance_and_fugacity(fluid, spe5_feed):
    for t, p in PT_GRID:
        eq = pt_flash(fluid, spe5_feed, t, p)
        assert eq.state is FlashState.TWO_PHASE
        balance = np.abs(
            spe5_feed.fractions
            - eq.beta * eq.y.fractions
            - (1 - eq.beta) * eq.x.fractions
        )
        assert balance.max() < 1e-12
        assert eq.residual < 1e-8


def test_flash_idempotence_on_stage_liquid(fluid, spe5_feed):
    stage2 = (313.15, 4e5)
    eq = pt_flash(fluid, spe5_feed, *stage2)
    assert eq.state is FlashState.TWO_PHASE
    again = pt_flash(fluid, eq.x, *stage2)
    assert (
        again.state is FlashState.SINGLE_PHASE_LIQUID or again.beta <= 1e-8
    )


def test_beta_monotone_in_temperature(fluid, spe5_feed):
    betas = [
        pt_flash(fluid, spe5_feed, t, 66e5).beta
        for t in np.linspace(290.0, 360.0, 8)
    ]
    assert all(b2 >= b1 for b1, b2 in zip(betas, betas[1:]))


def test_flash_subcooled_oil_single_liquid(fluid, forward_run):
    oil = forward_run.truths[0].streams.oil
    eq = pt_flash(fluid, oil, 338.15, 66e5)
    assert eq.state is FlashState.SINGLE_PHASE_LIQUID
    assert eq.beta == 0.0
    assert np.array_equal(eq.x.fractions, oil.fractions)


def test_flash_near_dew_gas(fluid, forward_run):
    gas = forward_run.truths[0].streams.gas
    eq = pt_flash(fluid, gas, 338.15, 66e5)
    assert eq.state in (FlashState.SINGLE_PHASE_VAPOR, FlashState.TWO_PHASE)
    if eq.state is FlashState.TWO_PHASE:
        assert eq.beta > 0.999


# ---------------------------------------------------------------------------
# PH flash
# ---------------------------------------------------------------------------


def test_ph_flash_fixed_point(fluid, spe5_feed):
    for t0 in (300.0, 339.15, 355.0):
        eq = pt_flash(fluid, spe5_feed, t0, 66e5)
        h = mixture_enthalpy(fluid, eq, t0, 66e5)
        t_sol, _ = ph_flash(fluid, spe5_feed, 66e5, h, t0 - 7.0)
        assert t_sol == pytest.approx(t0, abs=1e-4)


def test_ph_flash_conserves_enthalpy(fluid, spe5_feed):
    eq_in = pt_flash(fluid, spe5_feed, 339.15, 96e5)
    h_in = mixture_enthalpy(fluid, eq_in, 339.15, 96e5)
    t_out, eq_out = ph_flash(fluid, spe5_feed, 66e5, h_in, 339.15)
    h_out = mixture_enthalpy(fluid, eq_out, t_out, 66e5)
    assert abs(h_out - h_in) < 0.01
    assert t_out != pytest.approx(339.15, abs=1e-3)  # real JT signal


def test_ph_flash_round_trip_grid(fluid, spe5_feed):
    for t, p in PT_GRID:
        eq = pt_flash(fluid, spe5_feed, t, p)
        h = mixture_enthalpy(fluid, eq, t, p)
        t_back, eq_back = ph_flash(fluid, spe5_feed, p, h, t + 3.0)
        assert t_back == pytest.approx(t, abs=1e-4)
        h_back = mixture_enthalpy(fluid, eq_back, t_back, p)
        assert abs(h_back - h) < 0.01


def test_ph_flash_ideal_gas_no_temperature_change(fluid):
    zc1 = pure(fluid, "C1")
    eq = pt_flash(fluid, zc1, 300.0, 200.0)
    h = mixture_enthalpy(fluid, eq, 300.0, 200.0)
    t_out, _ = ph_flash(fluid, zc1, 100.0, h, 300.0)
    assert abs(t_out - 300.0) < 0.01


def test_ph_flash_unreachable_enthalpy(fluid, spe5_feed):
    eq = pt_flash(fluid, spe5_feed, 339.15, 66e5)
    h = mixture_enthalpy(fluid, eq, 339.15, 66e5)
    with pytest.raises(UnreachableEnthalpyError):
        ph_flash(fluid, spe5_feed, 66e5, h + 1e6, 339.15)


def test_ph_flash_rejects_bad_pressure(fluid, spe5_feed):
    with pytest.raises(ValueError):
        ph_flash(fluid, spe5_feed, -1.0, 0.0, 300.0)
