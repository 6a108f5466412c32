import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fieldlab.grassmann import (
    GrassmannAlgebra,
    GrassmannElement,
    ToyFermionField,
    anticommutator,
    berezin_integral,
    complex_anticommutator,
    configuration_eigenstate,
    density_pathology_report,
    field_anticommutator,
    functional_inner_product,
    measure_weight,
    monomial_sign,
    paired_distribution,
    paired_probability,
)


def jw_generators(n):
    """Jordan-Wigner raising matrices: anticommuting, nilpotent, products independent on the vacuum."""
    z = np.diag([1.0, -1.0])
    up = np.array([[0.0, 0.0], [1.0, 0.0]])
    eye = np.eye(2)
    mats = []
    for g in range(n):
        m = np.ones((1, 1))
        for f in [z] * g + [up] + [eye] * (n - g - 1):
            m = np.kron(m, f)
        mats.append(m)
    return mats


def as_matrix(x: GrassmannElement, mats):
    dim = mats[0].shape[0]
    out = np.zeros((dim, dim), dtype=complex)
    for mask, v in x.coefficients.items():
        m = np.eye(dim)
        for g in range(x.algebra.generators):
            if mask >> g & 1:
                m = m @ mats[g]
        out += v * m
    return out


def integer_element(alg, rng, terms=6):
    masks = rng.integers(0, 1 << alg.generators, size=terms)
    vals = rng.integers(-3, 4, size=terms) + 1j * rng.integers(-3, 4, size=terms)
    return GrassmannElement(alg, {int(m): complex(v) for m, v in zip(masks, vals)})


def test_algebra_validation():
    with pytest.raises(ValueError):
        GrassmannAlgebra(0)
    with pytest.raises(ValueError):
        GrassmannAlgebra(3)
    GrassmannAlgebra(3, self_conjugate=True)
    with pytest.raises(IndexError):
        GrassmannAlgebra(2).generator(2)
    with pytest.raises(ValueError):
        GrassmannElement(GrassmannAlgebra(2), {8: 1.0})
    with pytest.raises(ValueError):
        GrassmannAlgebra(2).scalar(1) + GrassmannAlgebra(4).scalar(1)


def test_generators_anticommute_and_square_to_zero():
    alg = GrassmannAlgebra(6)
    for i, j in itertools.product(range(6), repeat=2):
        assert anticommutator(alg.generator(i), alg.generator(j)).is_zero()
    assert (alg.generator(3) * alg.generator(3)).is_zero()


def test_monomial_sign_examples():
    assert monomial_sign(0b01, 0b10) == 1
    assert monomial_sign(0b10, 0b01) == -1
    assert monomial_sign(0b110, 0b001) == 1
    assert monomial_sign(0b100, 0b011) == 1
    assert monomial_sign(0b010, 0b101) == -1
    assert monomial_sign(0b11, 0b01) == 0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_product_matches_matrix_representation(seed):
    rng = np.random.default_rng(seed)
    alg = GrassmannAlgebra(6)
    mats = jw_generators(6)
    a, b = integer_element(alg, rng), integer_element(alg, rng)
    assert np.allclose(as_matrix(a * b, mats), as_matrix(a, mats) @ as_matrix(b, mats))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_ring_axioms_exact(seed):
    rng = np.random.default_rng(seed)
    alg = GrassmannAlgebra(8)
    a, b, c = (integer_element(alg, rng) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c
    assert a * 1 == a and 1 * a == a
    assert (a - a).is_zero()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_conjugation(seed):
    rng = np.random.default_rng(seed)
    alg = GrassmannAlgebra(6)
    a, b = integer_element(alg, rng), integer_element(alg, rng)
    assert a.conjugate().conjugate() == a
    assert (a * b).conjugate() == b.conjugate() * a.conjugate()
    assert (a * 2j).conjugate() == a.conjugate() * -2j


def test_odd_elements_anticommute_even_commute():
    alg = GrassmannAlgebra(6)
    odd1 = alg.generator(0) + alg.monomial([1, 2, 3]) * 2
    odd2 = alg.generator(4) * 3 - alg.generator(5)
    even = alg.monomial([1, 4]) + 1
    assert anticommutator(odd1, odd2).is_zero()
    assert (even * odd1 - odd1 * even).is_zero()


def test_monomial_order_and_dump():
    alg = GrassmannAlgebra(4)
    assert alg.monomial([2, 0]) == -alg.monomial([0, 2])
    x = alg.monomial([0, 2]) * (1 - 2j) + 3
    assert x.dump().splitlines() == ["1: 3.0+0.0i", "θ_{0}θ_{2}: 1.0-2.0i"]
    assert x.grades() == {0, 2}
    assert x.body == 3
    assert x.soul == alg.monomial([0, 2]) * (1 - 2j)


def test_toy_field_validation():
    with pytest.raises(ValueError):
        ToyFermionField(0)
    with pytest.raises(ValueError):
        ToyFermionField(2, (1.0,))
    f = ToyFermionField.from_configuration([1 + 2j, -1])
    assert np.allclose(f.complex_configuration(), [1 + 2j, -1])
    assert f.value(0) == f.theta(0) * (1 + 2j)
    assert f.theta_bar(0) == f.theta(0).conjugate()


def test_field_values_anticommute_but_complex_values_do_not(rng):
    values = rng.integers(-3, 4, 4) + 1j * rng.integers(-3, 4, 4)
    values[values == 0] = 1
    field = ToyFermionField(4, tuple(values))
    psi = integer_element(field.algebra, rng)
    for i, j in itertools.product(range(4), repeat=2):
        assert field_anticommutator(field, i, j, psi).is_zero()
        assert complex_anticommutator(values, i, j) == 2 * values[i] * values[j]
    assert complex_anticommutator(values, 0, 1) != 0


def test_density_is_not_a_number():
    field = ToyFermionField(3, (1.0, 2j, -0.5))
    report = density_pathology_report(field)
    assert report.density_body == 0
    assert report.density_pathological
    assert report.density_soul_terms == 3
    assert report.density_soul_max == pytest.approx(4.0)
    assert report.amplitude_body == 1
    assert report.amplitude_pathological
    data = json.loads(report.to_json())
    assert data["density_pathological"] is True


def test_berezin_integral_conventions():
    field = ToyFermionField(2)
    alg = field.algebra
    pair = [field.theta_bar(0) * field.theta(0), field.theta_bar(1) * field.theta(1)]
    assert berezin_integral(pair[0] * pair[1], 2) == 1
    assert berezin_integral(alg.scalar(5.0), 2) == 0
    # the measure weight integrates to one
    assert berezin_integral(measure_weight(field), 2) == 1
    with pytest.raises(ValueError):
        berezin_integral(alg.scalar(1.0), 3)


@pytest.mark.parametrize("modes", [1, 2, 3, 4])
def test_configuration_eigenstates_orthonormal(modes):
    field = ToyFermionField(modes)
    family = field.configuration_family()
    assert len(family) == 2**modes
    for s, t in itertools.product(family, repeat=2):
        amp = functional_inner_product(field, configuration_eigenstate(field, s), configuration_eigenstate(field, t))
        assert amp == pytest.approx(1.0 if s == t else 0.0, abs=1e-15)
    with pytest.raises(ValueError):
        configuration_eigenstate(field, (2,) * modes)


def test_paired_probabilities_sum_to_one(rng):
    field = ToyFermionField(3)
    psi = field.random_functional(rng)
    assert functional_inner_product(field, psi, psi) == pytest.approx(1.0, abs=1e-14)
    dist = paired_distribution(field, psi)
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-14)
    assert all(p >= 0 for p in dist.values())
    one = configuration_eigenstate(field, (1, 0, 1))
    assert paired_probability(field, one, (1, 0, 1)) == pytest.approx(1.0)
