import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from fieldlab.fock import FockState, TruncationError, boson_modes, create
from fieldlab.functional import (
    OscillatorBasis,
    WaveFunctional,
    bogoliubov_overlap,
    configuration_to_field,
    dumps_functional,
    em_functional_ground,
    em_oscillator_basis,
    evaluate,
    evolve_functional,
    excited_state,
    expected_energy,
    field_to_configuration,
    fock_to_functional,
    functional_to_fock,
    ground_overlap_closed_form,
    ground_state,
    inner_product,
    loads_functional,
    oscillator_functions,
    random_functional,
    sample_configurations,
    scalar_field_basis,
    scalar_mode_wavenumbers,
)
from fieldlab.modebasis import build_basis


def hermite_oracle(n, q, omega, hbar):
    xi = q * math.sqrt(omega / hbar)
    norm = (omega / (math.pi * hbar)) ** 0.25 / math.sqrt(2.0**n * math.factorial(n))
    return norm * special.eval_hermite(n, xi) * np.exp(-0.5 * xi**2)


@pytest.mark.parametrize("omega,hbar", [(1.0, 1.0), (2.7, 0.6)])
def test_oscillator_functions_match_hermite_polynomials(omega, hbar):
    q = np.linspace(-4, 4, 41)
    funcs = oscillator_functions(10, q, omega, hbar)
    for n in range(10):
        assert np.allclose(funcs[n], hermite_oracle(n, q, omega, hbar), atol=1e-12)


def test_oscillator_functions_orthonormal():
    x, w = np.polynomial.hermite.hermgauss(80)
    funcs = oscillator_functions(12, x, 1.0)
    gram = np.einsum("ni,mi,i->nm", funcs, funcs, w * np.exp(x**2))
    assert np.allclose(gram, np.eye(12), atol=1e-12)


def test_basis_validation():
    with pytest.raises(ValueError):
        OscillatorBasis(())
    with pytest.raises(ValueError):
        OscillatorBasis((1.0, 0.0))
    with pytest.raises(ValueError):
        OscillatorBasis((1.0,), labels=("a", "b"))
    with pytest.raises(ValueError):
        WaveFunctional(OscillatorBasis((1.0,), depth=3), np.zeros(4))
    with pytest.raises(TruncationError):
        excited_state(OscillatorBasis((1.0,), depth=3), (3,))


def test_ground_state_is_gaussian():
    basis = OscillatorBasis((0.8, 1.9), hbar=1.3)
    q = np.array([[0.3, -0.4], [1.1, 0.2]])
    expected = np.prod([(w / (math.pi * 1.3)) ** 0.25 for w in basis.omegas]) * np.exp(
        -np.sum(np.array(basis.omegas) * q**2, axis=1) / (2 * 1.3)
    )
    assert np.allclose(evaluate(ground_state(basis), q), expected)


def test_evaluate_matches_explicit_sum(rng):
    basis = OscillatorBasis((0.7, 1.0, 1.6), depth=4)
    psi = random_functional(basis, rng)
    q = rng.normal(size=(5, 3))
    funcs = [oscillator_functions(4, q[:, k], basis.omegas[k]) for k in range(3)]
    expected = np.einsum("abc,ai,bi,ci->i", psi.coefficients, *funcs)
    assert np.allclose(evaluate(psi, q), expected)
    assert evaluate(psi, q[0]).shape == ()
    with pytest.raises(ValueError):
        evaluate(psi, q[:, :2])


def test_inner_product_same_basis_is_coefficient_dot(rng):
    basis = OscillatorBasis((0.7, 1.0, 1.6), depth=5)
    a, b = random_functional(basis, rng), random_functional(basis, rng)
    assert inner_product(a, b) == pytest.approx(np.vdot(a.coefficients, b.coefficients), abs=1e-13)
    assert inner_product(a, a) == pytest.approx(1.0, abs=1e-13)
    with pytest.raises(ValueError):
        inner_product(a, b, nodes=32)


def test_inner_product_across_frequencies_matches_quad():
    b1 = OscillatorBasis((1.0,), depth=3)
    b2 = OscillatorBasis((2.5,), depth=3)
    a = WaveFunctional(b1, [0.6, 0.0, 0.8])
    b = WaveFunctional(b2, [0.0, 0.0, 1.0])
    value, _ = integrate.quad(lambda q: (evaluate(a, [q]) * evaluate(b, [q])).real, -12, 12, epsabs=1e-14)
    assert inner_product(a, b) == pytest.approx(value, abs=1e-12)


@given(w1=st.floats(0.05, 20), w2=st.floats(0.05, 20))
@settings(deadline=None)
def test_ground_overlap_closed_form(w1, w2):
    a = ground_state(OscillatorBasis((w1,)))
    b = ground_state(OscillatorBasis((w2,)))
    assert inner_product(a, b).real == pytest.approx(float(ground_overlap_closed_form(w1, w2)), rel=1e-10)


def test_energy_and_evolution(rng):
    basis = OscillatorBasis((0.5, 2.0), depth=4, hbar=1.5)
    psi = excited_state(basis, (1, 2))
    assert expected_energy(psi) == pytest.approx(1.5 * (0.5 + 4.0))
    assert expected_energy(psi, normal_ordered=False) == pytest.approx(1.5 * (0.5 + 4.0 + 1.25))
    mix = random_functional(basis, rng)
    later = evolve_functional(mix, 3.3)
    assert later.norm() == pytest.approx(1.0)
    assert expected_energy(later) == pytest.approx(expected_energy(mix))
    assert np.allclose(evolve_functional(later, -3.3).coefficients, mix.coefficients)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_fock_functional_round_trip(seed):
    rng = np.random.default_rng(seed)
    modes = boson_modes([0.7, 1.0, 1.6], n_max=3)
    configs = list(modes.configurations())
    amps = {configs[i]: complex(*rng.normal(size=2)) for i in rng.choice(len(configs), 4)}
    a = FockState(modes, amps).normalized()
    b = FockState(modes, {configs[i]: complex(*rng.normal(size=2)) for i in rng.choice(len(configs), 4)}).normalized()
    fa, fb = fock_to_functional(a), fock_to_functional(b)
    assert inner_product(fa, fb) == pytest.approx(a.inner(b), abs=1e-12)
    back = functional_to_fock(fa, modes)
    assert (back - a).is_zero(1e-15)


def test_fock_map_respects_depth():
    modes = boson_modes([1.0], n_max=5)
    state = FockState.basis_state(modes, (4,))
    with pytest.raises(TruncationError):
        fock_to_functional(state, depth=4)


def test_creation_matches_hermite_raising():
    # a^dagger |0> evaluated as a functional is the first excited oscillator function
    modes = boson_modes([1.3], n_max=2)
    one = create(FockState.vacuum(modes), 0)
    q = np.linspace(-2, 2, 9)
    assert np.allclose(evaluate(fock_to_functional(one, 3), q[:, None]), hermite_oracle(1, q, 1.3, 1.0))


def test_ground_sampling_variance(rng):
    basis = OscillatorBasis((0.5, 2.0), depth=3)
    q = sample_configurations(ground_state(basis), 20000, rng)
    assert np.var(q[:, 0]) == pytest.approx(1 / (2 * 0.5), rel=0.05)
    assert np.var(q[:, 1]) == pytest.approx(1 / (2 * 2.0), rel=0.05)


def test_entangled_sampling_moments(rng):
    basis = OscillatorBasis((1.0, 1.0), depth=2)
    c = np.zeros((2, 2))
    c[0, 1] = c[1, 0] = 1 / math.sqrt(2)
    psi = WaveFunctional(basis, c)
    q = sample_configurations(psi, 3000, rng, grid_points=801)
    # <q1 q2> = <psi| q1 q2 |psi> = 2 * (1/sqrt2)^2 * (1/sqrt2)^2 = 1/2
    assert np.mean(q[:, 0] * q[:, 1]) == pytest.approx(0.5, abs=0.06)


def test_scalar_mode_pairing_round_trip(rng):
    basis = build_basis(1, 10.0, 16)
    phi = rng.normal(size=16)
    q = field_to_configuration(basis, phi)
    assert q.shape == (16,)
    assert np.sum(q**2) == pytest.approx(basis.integrate(phi**2), rel=1e-12)
    assert np.allclose(configuration_to_field(basis, q), phi)
    ks = scalar_mode_wavenumbers(basis)
    assert ks[0] == 0 and ks[1] == ks[2] == pytest.approx(2 * np.pi / 10)
    with pytest.raises(ValueError):
        scalar_mode_wavenumbers(build_basis(3, 1.0, 4))


def test_scalar_field_basis_frequencies(unit):
    basis = scalar_field_basis(build_basis(1, 2 * np.pi, 8), mass=2.0, count=3)
    assert np.allclose(basis.omegas, [2.0, math.sqrt(5), math.sqrt(5)])


def test_overlap_decreases_and_is_log_linear():
    study = bogoliubov_overlap(1.0, 1.2, [1, 2, 4, 8, 16])
    assert np.all(np.diff(study.overlaps) < 0)
    assert study.r_squared > 0.999
    assert np.allclose(study.mode_factors, ground_overlap_closed_form(
        np.sqrt(1 + scalar_mode_wavenumbers(build_basis(1, 400.0, 64), 16) ** 2),
        np.sqrt(1.44 + scalar_mode_wavenumbers(build_basis(1, 400.0, 64), 16) ** 2),
    ), rtol=1e-10)
    with pytest.raises(ValueError):
        bogoliubov_overlap(1.0, 1.2, [4, 2])


def test_em_basis(unit):
    basis = em_oscillator_basis([[1.0, 0, 0], [0, 2.0, 0]], unit, depth=3)
    assert basis.omegas == (1.0, 1.0, 2.0, 2.0)
    assert em_functional_ground([[1.0, 0, 0]], unit, depth=2).is_normalized
    with pytest.raises(ValueError):
        em_oscillator_basis([[0, 0, 0]])


def test_serialization_round_trip(rng):
    basis = em_oscillator_basis([[1.0, 0, 0]], depth=3)
    psi = random_functional(basis, rng)
    back = loads_functional(dumps_functional(psi))
    assert back.basis == basis
    assert np.array_equal(back.coefficients, psi.coefficients)
    with pytest.raises(ValueError):
        loads_functional("index,real,imag\n")
