import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fieldlab.modebasis import (
    ModeBasis,
    PhysicalConstants,
    build_basis,
    dispersion_massive,
    dispersion_photon,
    load_basis_config,
)


def test_wavevectors_unit_box():
    b = build_basis(1, 2 * np.pi, 4)
    assert np.allclose(b.wavevectors()[:, 0], [-2, -1, 0, 1])


def test_wavevectors_half_box():
    b = build_basis(1, np.pi, 4)
    assert np.allclose(b.wavevectors()[:, 0], [-4, -2, 0, 2])


def test_three_dimensional_enumeration_and_negation():
    b = build_basis(3, 2 * np.pi, 4)
    ks = b.wavevectors()
    assert ks.shape == (64, 3)
    neg = b.negation_index()
    assert sorted(neg) == list(range(64))
    assert np.array_equal(neg[neg], np.arange(64))
    # away from the Nyquist plane the map is exact negation
    inner = np.all(b.mode_integers() > -2, axis=1)
    assert np.allclose(ks[neg[inner]], -ks[inner])


def test_canonical_order_is_row_major():
    ints = build_basis(3, 1.0, 4).mode_integers()
    assert tuple(ints[0]) == (-2, -2, -2)
    assert tuple(ints[1]) == (-2, -2, -1)
    assert tuple(ints[-1]) == (1, 1, 1)


@pytest.mark.parametrize("n", [3, 5, 2, 0])
def test_rejects_bad_points(n):
    with pytest.raises(ValueError):
        build_basis(1, 1.0, n)


@pytest.mark.parametrize("extent", [0.0, -1.0])
def test_rejects_bad_extent(extent):
    with pytest.raises(ValueError):
        build_basis(1, extent, 8)


def test_rejects_bad_dim():
    with pytest.raises(ValueError):
        build_basis(2, 1.0, 8)


def test_spacing_times_points_is_extent():
    b = build_basis(3, 7.3, 16)
    assert b.spacing * b.points_per_axis == pytest.approx(b.extent, rel=1e-15)


def test_constants_must_be_positive():
    with pytest.raises(ValueError):
        PhysicalConstants(m=0)
    with pytest.raises(ValueError):
        PhysicalConstants(c=-1)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.sampled_from([1, 3]), n=st.sampled_from([4, 8]))
def test_round_trip_and_parseval(seed, dim, n):
    rng = np.random.default_rng(seed)
    b = build_basis(dim, 3.7, n)
    f = rng.standard_normal((2,) + b.shape) + 1j * rng.standard_normal((2,) + b.shape)
    modes = b.to_modes(f)
    back = b.to_position(modes)
    assert np.linalg.norm(back - f) / np.linalg.norm(f) < 1e-12
    lhs = np.sum(np.abs(f) ** 2) * b.spacing**dim
    assert np.sum(np.abs(modes) ** 2) == pytest.approx(lhs, rel=1e-12)


def test_spectral_gradient_of_sine():
    b = build_basis(1, 2 * np.pi, 16)
    x = b.positions[0]
    grad = b.gradient(np.sin(3 * x)).real
    assert np.allclose(grad[0], 3 * np.cos(3 * x), atol=1e-12)


def test_dispersion_examples(unit):
    assert dispersion_massive(0.0, unit) == pytest.approx(1.0)
    assert dispersion_massive(3.0, unit.with_mass(1e-300)) == pytest.approx(3.0)
    assert dispersion_massive(1.0, unit) == pytest.approx(np.sqrt(2), rel=1e-15)
    assert dispersion_massive(np.array([1.0, 0, 0]), unit) == pytest.approx(np.sqrt(2))
    assert dispersion_photon(0.0) == 0
    assert dispersion_photon(2.0, unit) == 2.0
    assert dispersion_photon(np.array([3.0, 4.0, 0.0])) == pytest.approx(5.0)


def test_dispersion_units(odd_units):
    k = 0.8
    expected = np.sqrt((odd_units.m * odd_units.c**2) ** 2 + (odd_units.hbar * k * odd_units.c) ** 2) / odd_units.hbar
    assert dispersion_massive(k, odd_units) == pytest.approx(expected, rel=1e-15)
    assert dispersion_massive(0.0, odd_units) >= odd_units.m * odd_units.c**2 / odd_units.hbar


@given(k=st.floats(0.01, 100.0))
def test_massless_limit(k):
    c = PhysicalConstants(m=1e-8)
    assert dispersion_massive(k, c) == pytest.approx(dispersion_photon(k, c), rel=1e-6)


def test_load_basis_config(tmp_path):
    p = tmp_path / "basis.json"
    p.write_text(json.dumps({"dim": 3, "extent": 5.0, "points_per_axis": 8, "constants": {"m": 2.0}}))
    basis, constants = load_basis_config(p)
    assert basis == ModeBasis(3, 5.0, 8)
    assert constants.m == 2.0
    y = tmp_path / "basis.yaml"
    y.write_text("dim: 1\nextent: 2.0\npoints_per_axis: 4\n")
    assert load_basis_config(y)[0].dim == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 1, "extent": 1.0, "points_per_axis": 4, "colour": "red"}))
    with pytest.raises(ValueError, match="unknown"):
        load_basis_config(bad)
