import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbgcavity.fiber_modes import (C_LIGHT, FiberSpec, ModeSolverError, NoRootError,
                                   GuidedModeSolution, effective_area, eigen_residual,
                                   guided_profile, normalization_integral, solve_beta,
                                   solve_fundamental, wavenumber)
from fbgcavity.quadrature import QuadratureError


def test_reference_mode(mode):
    assert 1.0 < mode.n_eff < 1.45
    assert mode.n_eff == pytest.approx(1.0679, abs=2e-4)
    assert mode.omega == pytest.approx(wavenumber(852.0) * C_LIGHT)


def test_eigen_residual_small(fiber, mode):
    assert abs(eigen_residual(fiber, mode.k, mode.beta)) <= 1e-10


def test_normalisation(fiber, mode):
    assert normalization_integral(mode, fiber) == pytest.approx(1.0, abs=1e-6)


def test_normalisation_insensitive_to_cutoff(fiber, mode):
    assert normalization_integral(mode, fiber, r_max_nm=6000.0) == pytest.approx(1.0, abs=1e-6)


def test_effective_area(fiber, mode):
    area, r_eff = effective_area(mode, fiber)
    assert area == pytest.approx(0.65, abs=0.02)
    assert r_eff == pytest.approx(454.0, abs=5.0)
    assert r_eff == pytest.approx(math.sqrt(area * 1e6 / math.pi), rel=1e-12)


def test_effective_area_rejects_short_cutoff(fiber, mode):
    with pytest.raises(QuadratureError):
        effective_area(mode, fiber, r_max_nm=400.0)
    with pytest.raises(ValueError):
        effective_area(mode, fiber, r_max_nm=100.0)


def test_tangential_continuity_and_normal_jump(fiber, mode):
    a = fiber.a
    inner = guided_profile(mode, fiber, 1, 1, a * (1 - 1e-13))
    outer = guided_profile(mode, fiber, 1, 1, a)
    assert abs(inner.e_phi - outer.e_phi) <= 1e-8 * abs(outer.e_phi)
    assert abs(inner.e_z - outer.e_z) <= 1e-8 * abs(outer.e_z)
    assert abs(fiber.n1**2 * inner.e_r - outer.e_r) <= 1e-8 * abs(outer.e_r)


def test_surface_is_vacuum_side(fiber, mode):
    at_a = guided_profile(mode, fiber, 1, 1, fiber.a)
    just_out = guided_profile(mode, fiber, 1, 1, fiber.a * (1 + 1e-12))
    assert at_a.e_r == pytest.approx(just_out.e_r, rel=1e-9)


@pytest.mark.parametrize("f,l", [(1, 1), (1, -1), (-1, 1), (-1, -1)])
def test_magnitudes_independent_of_direction_and_polarisation(fiber, mode, f, l):
    r = np.linspace(0, 800, 9)
    ref = guided_profile(mode, fiber, 1, 1, r)
    e = guided_profile(mode, fiber, f, l, r)
    np.testing.assert_allclose(np.abs(e.e_r), np.abs(ref.e_r), rtol=1e-14)
    np.testing.assert_allclose(np.abs(e.e_phi), np.abs(ref.e_phi), rtol=1e-14)
    np.testing.assert_allclose(np.abs(e.e_z), np.abs(ref.e_z), rtol=1e-14)


def test_group_velocity_physical(mode):
    assert C_LIGHT / 1.45 < mode.v_g < C_LIGHT
    assert mode.v_g == pytest.approx(2.214e8, rel=1e-3)


def test_evanescent_decay_monotone(fiber, mode):
    r = np.linspace(fiber.a, 5 * fiber.a, 50)
    e2 = guided_profile(mode, fiber, 1, 1, r).norm2()
    assert np.all(np.diff(e2) < 0)


@settings(max_examples=25, deadline=None)
@given(a=st.floats(120.0, 400.0), lam=st.floats(700.0, 1100.0))
def test_root_bracketed_and_residual_small(a, lam):
    fib = FiberSpec(a=a)
    k = wavenumber(lam)
    beta = solve_beta(fib, k)
    assert fib.n2 * k < beta < fib.n1 * k
    assert abs(eigen_residual(fib, k, beta)) <= 1e-10


def test_thicker_fiber_confines_more():
    thin = solve_fundamental(FiberSpec(a=150), 852)
    thick = solve_fundamental(FiberSpec(a=300), 852)
    assert thick.n_eff > thin.n_eff


@pytest.mark.parametrize("kw", [dict(a=0), dict(a=-5), dict(n1=1.0, n2=1.0),
                                dict(n1=1.3, n2=1.45), dict(n2=0.9)])
def test_fiber_validation(kw):
    with pytest.raises(ValueError):
        FiberSpec(**kw)


def test_no_root_raises(monkeypatch):
    import fbgcavity.fiber_modes as fm
    monkeypatch.setattr(fm, "eigen_residual", lambda fiber, k, beta: np.ones_like(beta))
    with pytest.raises(NoRootError):
        fm.solve_beta(FiberSpec(), wavenumber(852))


def test_unnormalised_mode_rejected(fiber, mode):
    bare = GuidedModeSolution(omega=mode.omega, beta=mode.beta, h=mode.h, q_out=mode.q_out,
                              s=mode.s)
    with pytest.raises(ModeSolverError):
        guided_profile(bare, fiber, 1, 1, 200.0)
    with pytest.raises(ValueError):
        guided_profile(mode, fiber, 2, 1, 200.0)
    with pytest.raises(ValueError):
        guided_profile(mode, fiber, 1, 1, -1.0)
