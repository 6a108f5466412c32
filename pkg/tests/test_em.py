import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fieldlab.em import (
    SPIN_ONE,
    EMField,
    EMPlaneWaves,
    PhotonWF,
    boost_em,
    coulomb_self_energy,
    evolve_maxwell_free,
    gaussian_charge,
    gaussian_self_energy_closed_form,
    gaussian_self_energy_quadrature,
    good_transform,
    good_wavefunction,
    inverse_good,
    lorentz_force_density,
    photon_covariance_report,
    photon_densities,
    photon_energy,
    photon_wave_equation_residual,
    point_charge,
    point_force,
    random_transverse_field,
    refinement_study,
)
from fieldlab.lorentz import rest_frame_events
from fieldlab.modebasis import build_basis


def test_spin_one_algebra():
    s = SPIN_ONE
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        assert np.allclose(s[i] @ s[j] - s[j] @ s[i], 1j * s[k])
    assert np.allclose(sum(m @ m for m in s), 2 * np.eye(3))
    # (s.v) w = i v x w
    v, w = np.array([0.3, -1.0, 2.0]), np.array([1.5, 0.2, -0.7])
    assert np.allclose(np.einsum("i,iab,b->a", v, s, w), 1j * np.cross(v, w))


def test_random_field_is_transverse(rng):
    basis = build_basis(3, 5.0, 8)
    f = random_transverse_field(basis, rng)
    assert f.divergence_error() < 1e-14
    div = basis.to_position(np.sum(1j * basis.kgrid3 * basis.to_modes(f.E), axis=0))
    assert np.max(np.abs(div)) < 1e-12


def test_shape_validation():
    basis = build_basis(1, 1.0, 4)
    with pytest.raises(ValueError):
        EMField(basis, np.zeros((3, 5)), np.zeros((3, 4)))


def test_evolution_matches_maxwell_and_conserves(rng, odd_units):
    basis = build_basis(3, 6.0, 8)
    f = random_transverse_field(basis, rng)
    dt = 1e-5
    fwd = evolve_maxwell_free(f, dt, odd_units)
    bwd = evolve_maxwell_free(f, -dt, odd_units)
    deriv = f.time_derivative(odd_units)
    scale = np.abs(deriv.E).max()
    assert np.allclose((fwd.E - bwd.E) / (2 * dt), deriv.E, atol=1e-5 * scale)
    assert np.allclose((fwd.B - bwd.B) / (2 * dt), deriv.B, atol=1e-5 * scale)
    later = evolve_maxwell_free(f, 2.3, odd_units)
    assert later.energy() == pytest.approx(f.energy(), rel=1e-12)
    assert later.divergence_error() < 1e-12


def test_evolution_rejects_longitudinal_field(rng, unit):
    basis = build_basis(3, 6.0, 8)
    x = basis.positions[0]
    E = np.zeros((3,) + basis.shape)
    E[0] = np.sin(2 * np.pi * x / basis.extent)
    with pytest.raises(ValueError, match="divergence"):
        evolve_maxwell_free(EMField(basis, E, np.zeros_like(E)), 1.0, unit)


def test_good_transform_round_trip(rng, odd_units):
    basis = build_basis(3, 6.0, 8)
    f = random_transverse_field(basis, rng)
    wf = good_wavefunction(f, odd_units)
    back = inverse_good(wf)
    assert np.allclose(back.real, f.E, atol=1e-12)
    assert np.allclose(back.imag, f.B, atol=1e-12)
    assert wf.transverse_error() < 1e-12


def test_good_transform_rejects_mean(unit):
    basis = build_basis(3, 6.0, 4)
    F = np.ones((3,) + basis.shape, dtype=complex)
    with pytest.raises(ValueError, match="k=0"):
        good_transform(F, basis, unit)


def test_wave_equation_and_energy(rng, odd_units):
    basis = build_basis(3, 6.0, 8)
    f = random_transverse_field(basis, rng)
    wf = good_wavefunction(f, odd_units)
    assert photon_wave_equation_residual(wf) < 1e-12
    assert photon_energy(wf) == pytest.approx(f.energy(), rel=1e-12)


def test_helicity_split_of_circular_wave(unit):
    basis = build_basis(3, 2 * np.pi, 4)
    z = basis.positions[2]
    eps = np.array([1, 1j, 0]) / np.sqrt(2)
    phi = eps[:, None, None, None] * np.exp(1j * z)[None]
    plus, minus = PhotonWF(basis, phi, unit).split
    assert np.allclose(plus, phi, atol=1e-14)
    assert np.allclose(minus, 0, atol=1e-14)
    # s.khat eps = eps for the positive-helicity polarisation
    assert np.allclose(np.einsum("ab,b->a", SPIN_ONE[2], eps), eps)


def test_photon_densities_of_circular_wave(unit):
    eps = np.array([1, 1j, 0]) / np.sqrt(2)
    rho, current = photon_densities(eps[:, None], unit)
    assert rho[0] == pytest.approx(1.0)
    assert np.allclose(current[:, 0], [0, 0, unit.c])


@settings(max_examples=30, deadline=None)
@given(
    e=st.lists(st.floats(-3, 3), min_size=3, max_size=3),
    b=st.lists(st.floats(-3, 3), min_size=3, max_size=3),
    v=st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3),
)
def test_field_invariants_under_boost(e, b, v):
    E, B = np.array(e), np.array(b)
    E2, B2 = boost_em(E, B, v)
    assert float(E2 @ E2 - B2 @ B2) == pytest.approx(float(E @ E - B @ B), abs=1e-9)
    assert float(E2 @ B2) == pytest.approx(float(E @ B), abs=1e-9)
    # inverse boost recovers the fields
    E3, B3 = boost_em(E2, B2, -np.array(v))
    assert np.allclose(E3, E, atol=1e-9) and np.allclose(B3, B, atol=1e-9)


def test_boost_of_static_charge_field():
    # Coulomb field of a charge at rest seen from a frame moving along x picks up B = -v x E / c
    E = np.array([0.0, 1.0, 0.0])
    E2, B2 = boost_em(E, np.zeros(3), [0.6, 0, 0])
    assert np.allclose(E2, [0, 1.25, 0])
    assert np.allclose(B2, [0, 0, -0.75])


def test_boosted_plane_waves_match_transformed_fields(rng, odd_units):
    k = rng.normal(size=(3, 3))
    raw = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    khat = k / np.linalg.norm(k, axis=1, keepdims=True)
    eps = raw - khat * np.sum(khat * raw, axis=1, keepdims=True)
    waves = EMPlaneWaves(k, eps)
    v = np.array([0.3, -0.2, 0.4]) * odd_units.c
    moved = waves.boosted(v, odd_units.c)
    x_p = rng.uniform(-5, 5, size=(20, 3))
    t_p = rng.uniform(-5, 5, size=20)
    t_r, x_r = rest_frame_events(v, t_p, x_p, odd_units.c)
    E, B = waves.fields(x_r, t_r, odd_units.c)
    E_exp, B_exp = boost_em(E.T, B.T, v, odd_units.c)
    E_got, B_got = moved.fields(x_p, t_p, odd_units.c)
    assert np.allclose(E_got, E_exp.T, atol=1e-10)
    assert np.allclose(B_got, B_exp.T, atol=1e-10)


def test_plane_waves_validate():
    with pytest.raises(ValueError):
        EMPlaneWaves([[0, 0, 1.0]], [[0, 0, 1.0]])
    with pytest.raises(ValueError):
        EMPlaneWaves([[0, 0, 0.0]], [[1.0, 0, 0]])


def test_single_plane_wave_transforms_exactly(unit):
    # one wave: phi^dagger phi is proportional to the field's energy-flux null vector
    waves = EMPlaneWaves([[0, 0, 1.0]], [[1.0, 1j, 0]])
    assert photon_covariance_report(waves, [0.5, 0, 0], unit) < 1e-12


def test_superposition_breaks_four_vector_law(rng, unit):
    k = rng.normal(size=(3, 3))
    raw = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    khat = k / np.linalg.norm(k, axis=1, keepdims=True)
    waves = EMPlaneWaves(k, raw - khat * np.sum(khat * raw, axis=1, keepdims=True))
    assert photon_covariance_report(waves, [0.5, 0, 0], unit, rng) > 0.01
    assert photon_covariance_report(waves, [0, 0, 0], unit, rng) < 1e-12


def test_forces():
    f = point_force(2.0, [0, 1.0, 0], [1.0, 0, 0], [0, 0, 3.0], c=2.0)
    assert np.allclose(f, [2 + 3.0, 0, 0])
    rho = np.ones(4)
    J = np.zeros((3, 4))
    J[0] = 1.0
    E = np.zeros((3, 4))
    B = np.zeros((3, 4))
    B[2] = 1.0
    assert np.allclose(lorentz_force_density(rho, J, E, B), [[0] * 4, [-1] * 4, [0] * 4])


def test_gaussian_self_energy_oracles():
    assert gaussian_self_energy_quadrature(1.3, 0.7) == pytest.approx(gaussian_self_energy_closed_form(1.3, 0.7), rel=1e-12)
    assert gaussian_self_energy_closed_form(1.0, 1.0) == pytest.approx(0.28209479177387814, rel=1e-15)


def test_lattice_self_energy_matches_closed_form():
    basis = build_basis(3, 12.0, 32)
    u = coulomb_self_energy(gaussian_charge(basis, 1.0, 1.0), basis)
    assert u == pytest.approx(gaussian_self_energy_closed_form(1.0, 1.0), rel=1e-6)
    # without the correction, the periodic images lower the energy
    assert coulomb_self_energy(gaussian_charge(basis, 1.0, 1.0), basis, isolated=False) < u


def test_self_energy_needs_three_dimensions():
    basis = build_basis(1, 4.0, 8)
    with pytest.raises(ValueError):
        coulomb_self_energy(np.ones(8), basis)


def test_point_charge_energy_grows_under_refinement():
    rows = refinement_study(lambda b: point_charge(b, 1.0), [build_basis(3, 4.0, n) for n in (8, 16)])
    assert rows[1][1] / rows[0][1] == pytest.approx(2.0, rel=0.01)
