import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbgcavity.cavity_response import (CavitySpec, finesse, impact_bounds, impact_factor,
                                       impact_series, overdamped_report, phase_per_crossing,
                                       tune_length)
from fbgcavity.emission_rates import AtomSpec

R_values = st.floats(0.0, 0.995)


@settings(max_examples=200, deadline=None)
@given(Phi=st.floats(-10, 10), R=R_values, bz=st.floats(-10, 10))
def test_impact_factor_within_bounds(Phi, R, bz):
    lo, hi = impact_bounds(R)
    G = impact_factor(Phi, R, bz)
    assert lo * (1 - 1e-12) <= G <= hi * (1 + 1e-12)


@pytest.mark.parametrize("R2", [0.5, 0.9, 0.99])
def test_bounds_reached_at_resonance(R2):
    R = math.sqrt(R2)
    lo, hi = impact_bounds(R)
    assert impact_factor(0.0, R, 0.0) == pytest.approx(hi, rel=1e-14)
    assert impact_factor(0.0, R, math.pi / 2) == pytest.approx(lo, rel=1e-14)
    # odd resonance swaps nodes and antinodes
    assert impact_factor(math.pi, R, 0.0) == pytest.approx(lo, rel=1e-14)
    assert impact_factor(math.pi, R, math.pi / 2) == pytest.approx(hi, rel=1e-14)


def test_periodicity():
    Phi = np.linspace(-3, 3, 13)
    bz = np.linspace(0, 2, 13)
    G = impact_factor(Phi, 0.8, bz)
    np.testing.assert_allclose(impact_factor(Phi + 2 * math.pi, 0.8, bz), G, rtol=1e-12)
    np.testing.assert_allclose(impact_factor(Phi, 0.8, bz + math.pi), G, rtol=1e-12)


@pytest.mark.parametrize("R", [0.3, 0.9])
def test_mean_over_position_is_airy_average(R):
    # averaging cos(2 beta z) away leaves (1 + R^2) / den
    bz = np.linspace(0, math.pi, 4096, endpoint=False)
    for Phi in (0.0, 0.4, 2.0):
        den = 1 - R * R + 4 * R * R / (1 - R * R) * math.sin(Phi) ** 2
        assert impact_factor(Phi, R, bz).mean() == pytest.approx((1 + R * R) / den, rel=1e-12)


def test_no_mirror_gives_unity():
    G = impact_factor(np.linspace(0, 6, 7), 0.0, np.linspace(0, 3, 7))
    np.testing.assert_allclose(G, 1.0, rtol=0, atol=1e-15)


@pytest.mark.parametrize("R", [0.5, 0.9])
def test_series_matches_closed_form(R):
    Phi = np.linspace(-2, 2, 9)[:, None]
    bz = np.linspace(0, 1.5, 5)[None, :]
    N = int(math.ceil(math.log(1e-15) / (2 * math.log(R)))) + 5
    np.testing.assert_allclose(impact_series(Phi, R, bz, N), impact_factor(Phi, R, bz),
                               rtol=1e-12, atol=1e-12)


def test_series_converges_geometrically():
    R, Phi, bz = 0.9, 0.3, 0.2
    exact = impact_factor(Phi, R, bz)
    errs = [abs(impact_series(Phi, R, bz, N) - exact) for N in (10, 20, 40)]
    bound = [2 * (1 + R) * R ** (2 * N + 2) / (1 - R * R) for N in (10, 20, 40)]
    assert all(e <= b for e, b in zip(errs, bound))
    with pytest.raises(ValueError):
        impact_series(Phi, R, bz, -1)


def test_finesse_values():
    assert finesse(math.sqrt(0.9)) == pytest.approx(29.80, abs=0.01)
    assert finesse(math.sqrt(0.8)) == pytest.approx(14.05, abs=0.01)
    assert finesse(0.0) == 0.0


@pytest.mark.parametrize("parity,target", [("even", 0.0), ("odd", math.pi)])
@pytest.mark.parametrize("L", [1e-3, 0.2, 3.0])
def test_tune_length_hits_resonance(mode, parity, target, L):
    cav = CavitySpec(L=L, R_mag=0.9)
    L_new = tune_length(cav, mode, 1, parity)
    assert abs(L_new - L) <= 2 * math.pi / mode.beta
    Phi = phase_per_crossing(mode, CavitySpec(L=L_new, R_mag=0.9), 1)
    assert math.cos(Phi - target) == pytest.approx(1.0, abs=1e-9)
    if L <= 1e-3:
        assert abs(math.sin(Phi)) <= 1e-10


def test_tune_length_rejects_bad_parity(mode):
    with pytest.raises(ValueError):
        tune_length(CavitySpec(L=0.1, R_mag=0.9), mode, 1, "both")


def test_phase_follows_frequency_and_absorption(mode):
    cav = CavitySpec(L=0.01, R_mag=0.9)
    dw = 1e9
    shift = phase_per_crossing(mode, cav, 1, mode.omega + dw) - phase_per_crossing(mode, cav, 1)
    assert shift == pytest.approx(dw * cav.L / mode.v_g, rel=1e-9)
    lossy = phase_per_crossing(mode, CavitySpec(L=0.01, R_mag=0.9, alpha=1e-5), 1)
    assert lossy.imag == pytest.approx(0.5 * 1e-3 * 0.01, rel=1e-12)


@pytest.mark.parametrize("R2,G_max,eta", [(0.8, 17.944, 0.8715), (0.9, 37.974, 0.9349)])
def test_overdamped_enhancement(fiber, mode, atom, free_rates, tuned, R2, G_max, eta):
    cav = tuned(mode, 1e-3, R2=R2)
    rep = overdamped_report(fiber, mode, atom, cav, free_rates)
    assert rep.G0 == pytest.approx(G_max, rel=1e-3)
    assert rep.eta == pytest.approx(eta, abs=1e-3)
    assert rep.Gamma_total == pytest.approx(rep.gamma_cavgyd + rep.gamma_rad, rel=1e-14)


def test_node_suppresses(fiber, mode, free_rates, tuned):
    cav = tuned(mode, 1e-3)
    node = AtomSpec(z=math.pi / (2 * mode.beta) * 1e9)
    rep = overdamped_report(fiber, mode, node, cav, free_rates)
    assert rep.G0 == pytest.approx(impact_bounds(cav.R_mag)[0], rel=1e-6)


@pytest.mark.parametrize("kw", [dict(L=0, R_mag=0.5), dict(L=1, R_mag=1.0),
                                dict(L=1, R_mag=-0.1), dict(L=1, R_mag=0.5, alpha=-1)])
def test_cavity_validation(kw):
    with pytest.raises(ValueError):
        CavitySpec(**kw)
    with pytest.raises(ValueError):
        CavitySpec.from_reflectivity(1.0, 1.0)
    with pytest.raises(ValueError):
        impact_factor(0.0, 1.0, 0.0)


def test_from_reflectivity():
    cav = CavitySpec.from_reflectivity(0.2, 0.9)
    assert cav.R_mag == pytest.approx(math.sqrt(0.9))
    assert cav.T_mag == pytest.approx(math.sqrt(0.1))


def test_eta_without_mirrors(fiber, mode, atom, free_rates):
    rep = overdamped_report(fiber, mode, atom, CavitySpec(L=0.01, R_mag=1e-9), free_rates)
    expected = free_rates.gamma_gyd / free_rates.gamma_total_free
    assert rep.eta == pytest.approx(expected, abs=1e-6)


def test_pi_dipole_swaps_nodes_and_antinodes(fiber, mode, tuned):
    from fbgcavity.emission_rates import rates
    cav = tuned(mode, 1e-3)
    z_grid = np.linspace(-math.pi / mode.beta, math.pi / mode.beta, 201) * 1e9
    circ = rates(fiber, AtomSpec(q=1), mode)
    lin = rates(fiber, AtomSpec(q=0), mode)
    g_circ = [overdamped_report(fiber, mode, AtomSpec(z=z, q=1), cav, circ).Gamma_total
              for z in z_grid]
    g_lin = [overdamped_report(fiber, mode, AtomSpec(z=z, q=0), cav, lin).Gamma_total
             for z in z_grid]
    assert np.argmax(g_circ) == np.argmin(g_lin)


def test_tune_length_fixed_point_and_parity_flip(mode):
    L_even = tune_length(CavitySpec(L=0.05, R_mag=0.9), mode, 1, "even")
    assert tune_length(CavitySpec(L=L_even, R_mag=0.9), mode, 1, "even") == pytest.approx(
        L_even, rel=1e-14)
    L_odd = tune_length(CavitySpec(L=L_even, R_mag=0.9), mode, 1, "odd")
    assert abs(L_odd - L_even) == pytest.approx(math.pi / mode.beta, rel=1e-9)
