"""Free classical electromagnetism, the Riemann-Silberstein vector and Good's photon wave function.

Gaussian-cgs throughout: energy density (E^2 + B^2) / 8 pi, Maxwell curl
equations dE/dt = c curl B and dB/dt = -c curl E, force density
rho E + J x B / c.  Fields are real arrays of shape ``(3, *lattice)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate, special

from .lorentz import boost_matrix, boost_wavevector, check_velocity, four_vector_mismatch, rest_frame_events
from .modebasis import ModeBasis, PhysicalConstants

# Simple-cubic Madelung constant for a point charge in a neutralising background.
MADELUNG_SIMPLE_CUBIC = 2.8372974794806

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0


def spin_one_matrices() -> np.ndarray:
    """(s_i)_jk = -i epsilon_ijk, shape ``(3, 3, 3)``."""
    return -1j * LEVI_CIVITA


SPIN_ONE = spin_one_matrices()


def _cross_modes(k3: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.cross(k3, v, axis=0)


def transverse_fraction(basis: ModeBasis, values: np.ndarray) -> float:
    """Relative L2 size of the longitudinal part k.v / |k| of a vector field."""
    modes = basis.to_modes(values)
    kmag = basis.kmag
    with np.errstate(divide="ignore", invalid="ignore"):
        khat = np.where(kmag > 0, basis.kgrid3 / kmag, 0.0)
    longitudinal = np.sum(khat * modes, axis=0)
    total = np.sqrt(np.sum(np.abs(modes) ** 2))
    if total == 0:
        return 0.0
    return float(np.sqrt(np.sum(np.abs(longitudinal) ** 2)) / total)


@dataclass(frozen=True, eq=False)
class EMField:
    basis: ModeBasis
    E: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        shape = (3,) + self.basis.shape
        for name in ("E", "B"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def divergence_error(self) -> float:
        return max(transverse_fraction(self.basis, self.E), transverse_fraction(self.basis, self.B))

    def energy(self) -> float:
        """Integral of (E^2 + B^2) / 8 pi."""
        return float(self.basis.integrate(np.sum(self.E**2 + self.B**2, axis=0)) / (8 * np.pi))

    def time_derivative(self, constants: PhysicalConstants) -> "EMField":
        """(c curl B, -c curl E) evaluated spectrally."""
        basis, c = self.basis, constants.c
        k3 = basis.kgrid3
        curl_b = basis.to_position(1j * _cross_modes(k3, basis.to_modes(self.B))).real
        curl_e = basis.to_position(1j * _cross_modes(k3, basis.to_modes(self.E))).real
        return EMField(basis, c * curl_b, -c * curl_e)


def random_transverse_field(
    basis: ModeBasis, rng: np.random.Generator, band: float = 0.5, zero_mean: bool = True
) -> EMField:
    """Real divergence-free (E, B) with modes below ``band * N/2`` on every axis."""
    cut = band * basis.points_per_axis / 2
    ints = np.rint(basis.kgrid * basis.extent / (2 * np.pi))
    keep = np.all(np.abs(ints) < cut, axis=0)
    if zero_mean:
        keep &= basis.kmag > 0
    kmag = basis.kmag
    with np.errstate(divide="ignore", invalid="ignore"):
        khat = np.where(kmag > 0, basis.kgrid3 / kmag, 0.0)
    fields = []
    for _ in range(2):
        modes = rng.standard_normal((3,) + basis.shape) + 1j * rng.standard_normal((3,) + basis.shape)
        modes -= khat * np.sum(khat * modes, axis=0)
        fields.append(basis.to_position(modes * keep).real)
    return EMField(basis, *fields)


def _rotate_about_k(modes: np.ndarray, k3: np.ndarray, angle: np.ndarray) -> np.ndarray:
    """Rodrigues rotation of each mode vector about its own wavevector."""
    kmag = np.sqrt(np.sum(k3**2, axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        khat = np.where(kmag > 0, k3 / kmag, 0.0)
    cross = np.cross(khat, modes, axis=0)
    dot = np.sum(khat * modes, axis=0)
    return np.cos(angle) * modes + np.sin(angle) * cross + (1 - np.cos(angle)) * khat * dot


def evolve_maxwell_free(
    field: EMField, t: float, constants: PhysicalConstants, tol: float = 1e-10
) -> EMField:
    """Exact source-free evolution: F = E + iB rotates about k by angle c|k|t in every mode."""
    if field.divergence_error() > tol:
        raise ValueError(f"field is not divergence-free (relative longitudinal part {field.divergence_error():.2e})")
    basis = field.basis
    f_modes = basis.to_modes(field.E + 1j * field.B)
    angle = constants.c * basis.kmag * t
    evolved = basis.to_position(_rotate_about_k(f_modes, basis.kgrid3, angle))
    return EMField(basis, evolved.real, evolved.imag)


def riemann_silberstein(E: np.ndarray, B: np.ndarray) -> np.ndarray:
    """F = E + i B."""
    return np.asarray(E) + 1j * np.asarray(B)


# ---------------------------------------------------------------------------
# Good's photon wave function


def _good_weight(basis: ModeBasis, constants: PhysicalConstants) -> np.ndarray:
    """1 / sqrt(8 pi hbar c |k|) per mode, zero at k = 0."""
    kmag = basis.kmag
    with np.errstate(divide="ignore"):
        return np.where(kmag > 0, 1.0 / np.sqrt(8 * np.pi * constants.hbar * constants.c * kmag), 0.0)


def _helicity_projectors(basis: ModeBasis) -> tuple[np.ndarray, np.ndarray]:
    """P_pm = ((s.khat)^2 pm s.khat) / 2 per mode, shape ``(3, 3, *lattice)``."""
    kmag = basis.kmag
    with np.errstate(divide="ignore", invalid="ignore"):
        khat = np.where(kmag > 0, basis.kgrid3 / kmag, 0.0)
    s_k = np.einsum("iab,i...->ab...", SPIN_ONE, khat)
    s_k2 = np.einsum("ab...,bc...->ac...", s_k, s_k)
    return 0.5 * (s_k2 + s_k), 0.5 * (s_k2 - s_k)


@dataclass(frozen=True, eq=False)
class PhotonWF:
    """Good's candidate photon wave function phi (position rep) and, when known, its source field."""

    basis: ModeBasis
    phi: np.ndarray  # (3, *lattice) complex
    constants: PhysicalConstants
    source: EMField | None = None

    def __post_init__(self):
        phi = np.array(self.phi, dtype=complex)
        if phi.shape != (3,) + self.basis.shape:
            raise ValueError(f"phi must have shape {(3,) + self.basis.shape}, got {phi.shape}")
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)

    @cached_property
    def split(self) -> tuple[np.ndarray, np.ndarray]:
        """Positive-frequency (helicity +1) and negative-frequency (helicity -1) parts."""
        modes = self.basis.to_modes(self.phi)
        p_plus, p_minus = _helicity_projectors(self.basis)
        plus = np.einsum("ab...,b...->a...", p_plus, modes)
        minus = np.einsum("ab...,b...->a...", p_minus, modes)
        return self.basis.to_position(plus), self.basis.to_position(minus)

    def with_phi(self, phi: np.ndarray) -> "PhotonWF":
        return PhotonWF(self.basis, phi, self.constants, self.source)

    def transverse_error(self) -> float:
        return transverse_fraction(self.basis, self.phi)


def good_transform(F: np.ndarray, basis: ModeBasis, constants: PhysicalConstants, tol: float = 1e-12) -> np.ndarray:
    """Divide every spatial Fourier mode of F by sqrt(8 pi hbar c |k|)."""
    modes = basis.to_modes(np.asarray(F, dtype=complex))
    zero = (0,) * basis.dim
    mean = np.linalg.norm(modes[(slice(None),) + zero])
    if mean > tol * max(1.0, np.sqrt(np.sum(np.abs(modes) ** 2))):
        raise ValueError(f"F has a k=0 component of size {mean:.3e}; the photon weight 1/sqrt(k) is singular there")
    return basis.to_position(modes * _good_weight(basis, constants))


def good_wavefunction(field: EMField, constants: PhysicalConstants) -> PhotonWF:
    F = riemann_silberstein(field.E, field.B)
    return PhotonWF(field.basis, good_transform(F, field.basis, constants), constants, field)


def inverse_good(wf: PhotonWF) -> np.ndarray:
    """Recover F = E + iB from phi."""
    basis = wf.basis
    weight = _good_weight(basis, wf.constants)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(weight > 0, 1.0 / weight, 0.0)
    return basis.to_position(basis.to_modes(wf.phi) * inv)


def _phi_time_derivative(wf: PhotonWF) -> np.ndarray:
    """d phi / dt via Maxwell's equations on the source field (wave equation if no source)."""
    if wf.source is not None:
        d = wf.source.time_derivative(wf.constants)
        return good_transform(riemann_silberstein(d.E, d.B), wf.basis, wf.constants)
    return -1j / wf.constants.hbar * _apply_photon_hamiltonian(wf)


def _apply_photon_hamiltonian(wf: PhotonWF) -> np.ndarray:
    """c s.p phi with p = -i hbar grad, spectrally."""
    basis = wf.basis
    modes = basis.to_modes(wf.phi)
    s_k = np.einsum("iab,i...->ab...", SPIN_ONE, basis.kgrid3)
    out = wf.constants.c * wf.constants.hbar * np.einsum("ab...,b...->a...", s_k, modes)
    return basis.to_position(out)


def photon_wave_equation_residual(wf: PhotonWF) -> float:
    """Relative L2 residual of i hbar d phi/dt = c s.p phi, with d phi/dt from Maxwell evolution."""
    lhs = 1j * wf.constants.hbar * _phi_time_derivative(wf)
    rhs = _apply_photon_hamiltonian(wf)
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))


def photon_energy(wf: PhotonWF) -> float:
    """i hbar integral (phi_+^dagger d phi_+/dt - phi_-^dagger d phi_-/dt)."""
    dphi = PhotonWF(wf.basis, _phi_time_derivative(wf), wf.constants)
    plus, minus = wf.split
    dplus, dminus = dphi.split
    density = np.sum(plus.conj() * dplus - minus.conj() * dminus, axis=0)
    value = 1j * wf.constants.hbar * wf.basis.integrate(density)
    return float(value.real)


def photon_densities(phi: np.ndarray, constants: PhysicalConstants) -> tuple[np.ndarray, np.ndarray]:
    """rho^p = phi^dagger phi and J^p = c phi^dagger s phi; ``phi`` has the vector index first."""
    phi = np.asarray(phi)
    rho = np.sum(np.abs(phi) ** 2, axis=0)
    current = constants.c * np.einsum("a...,iab,b...->i...", phi.conj(), SPIN_ONE, phi).real
    return rho, current


# ---------------------------------------------------------------------------
# boosts


def boost_em(E, B, v, c: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Fields seen from a frame moving with velocity v (vector index first, any trailing shape)."""
    v = check_velocity(v, c)
    beta = v / c
    b2 = float(beta @ beta)
    E = np.asarray(E)
    B = np.asarray(B)
    if b2 == 0:
        return E.copy(), B.copy()
    g = 1.0 / np.sqrt(1 - b2)
    shape = (3,) + (1,) * (E.ndim - 1)
    bvec = beta.reshape(shape)
    e_par = np.sum(bvec * E, axis=0) * bvec / b2
    b_par = np.sum(bvec * B, axis=0) * bvec / b2
    e_new = e_par + g * (E - e_par + np.cross(bvec, B, axis=0))
    b_new = b_par + g * (B - b_par - np.cross(bvec, E, axis=0))
    return e_new, b_new


def boost_em_field(field: EMField, v, constants: PhysicalConstants) -> EMField:
    """Pointwise field transformation of lattice values (no change of sampling points)."""
    e_new, b_new = boost_em(field.E, field.B, v, constants.c)
    return EMField(field.basis, e_new, b_new)


@dataclass(frozen=True)
class EMPlaneWaves:
    """Free field E = Re sum_j eps_j exp(i (k_j.x - c|k_j| t)), B = khat_j x E_j."""

    wavevectors: np.ndarray  # (n, 3)
    polarizations: np.ndarray  # (n, 3) complex, transverse

    def __post_init__(self):
        k = np.atleast_2d(np.asarray(self.wavevectors, dtype=float))
        eps = np.atleast_2d(np.asarray(self.polarizations, dtype=complex))
        if np.any(np.linalg.norm(k, axis=1) == 0):
            raise ValueError("plane waves need nonzero wavevectors")
        khat = k / np.linalg.norm(k, axis=1, keepdims=True)
        if np.max(np.abs(np.sum(khat * eps, axis=1))) > 1e-12 * max(1.0, np.abs(eps).max()):
            raise ValueError("polarizations must be transverse to their wavevectors")
        object.__setattr__(self, "wavevectors", k)
        object.__setattr__(self, "polarizations", eps)

    @property
    def khat(self) -> np.ndarray:
        return self.wavevectors / np.linalg.norm(self.wavevectors, axis=1, keepdims=True)

    def _phases(self, x, t, c):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        omega = c * np.linalg.norm(self.wavevectors, axis=1)
        return np.exp(1j * (x @ self.wavevectors.T - t[..., None] * omega))

    def fields(self, x, t, c: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
        """E and B at events, each of shape ``(..., 3)``."""
        ph = self._phases(x, t, c)
        b_pol = np.cross(self.khat, self.polarizations)
        return (ph @ self.polarizations).real, (ph @ b_pol).real

    def photon_wf(self, x, t, constants: PhysicalConstants) -> np.ndarray:
        """Good's phi at events, ``(..., 3)``; each wave's F is weighted by 1/sqrt(8 pi hbar c |k|)."""
        ph = self._phases(x, t, constants.c)
        weight = 1.0 / np.sqrt(8 * np.pi * constants.hbar * constants.c * np.linalg.norm(self.wavevectors, axis=1))
        b_pol = np.cross(self.khat, self.polarizations)
        e_part = ((ph[..., :, None] * self.polarizations).real * weight[:, None]).sum(axis=-2)
        b_part = ((ph[..., :, None] * b_pol).real * weight[:, None]).sum(axis=-2)
        return e_part + 1j * b_part

    def boosted(self, v, c: float = 1.0) -> "EMPlaneWaves":
        """Each wave maps to a wave with the Doppler-shifted wavevector and transformed amplitude."""
        omega = c * np.linalg.norm(self.wavevectors, axis=1)
        k_new, _ = boost_wavevector(self.wavevectors, omega, v, c)
        b_pol = np.cross(self.khat, self.polarizations)
        e_new, _ = boost_em(self.polarizations.T, b_pol.T, v, c)
        return EMPlaneWaves(k_new, e_new.T)


def photon_covariance_report(
    waves: EMPlaneWaves,
    v,
    constants: PhysicalConstants,
    rng: np.random.Generator | None = None,
    points: int = 256,
    spread: float = 10.0,
) -> float:
    """Max relative deviation of boosted-frame Good densities from the four-vector transform."""
    c = constants.c
    check_velocity(v, c)
    rng = np.random.default_rng(0) if rng is None else rng
    boosted = waves.boosted(v, c)
    x_prime = rng.uniform(-spread, spread, size=(points, 3))
    t_prime = rng.uniform(-spread, spread, size=points) / c
    t_rest, x_rest = rest_frame_events(v, t_prime, x_prime, c)

    def four_current(w, x, t):
        rho, current = photon_densities(np.moveaxis(w.photon_wf(x, t, constants), -1, 0), constants)
        return np.concatenate([c * rho[None], current]).T

    expected = four_current(waves, x_rest, t_rest) @ boost_matrix(v, c).T
    got = four_current(boosted, x_prime, t_prime)
    return four_vector_mismatch(got, expected)


# ---------------------------------------------------------------------------
# forces and Coulomb energy


def lorentz_force_density(rho_q, J, E, B, c: float = 1.0) -> np.ndarray:
    """f = rho^q E + J x B / c, vector index first."""
    return np.asarray(rho_q) * np.asarray(E) + np.cross(J, B, axis=0) / c


def point_force(q: float, v, E, B, c: float = 1.0) -> np.ndarray:
    """F = q E + (q / c) v x B."""
    return q * np.asarray(E, dtype=float) + (q / c) * np.cross(v, B)


def coulomb_self_energy(rho: np.ndarray, basis: ModeBasis, isolated: bool = True) -> float:
    """(1/2) integral integral rho(x) rho(y) / |x - y| through the 4 pi / k^2 kernel.

    The k = 0 mode is dropped (neutralising background).  With ``isolated``
    the leading finite-box terms for a localised density are removed:
    U_iso = U_periodic + q^2 M / 2L - 2 pi q Q / 3L^3, where M is the
    simple-cubic Madelung constant and Q the second radial moment about the
    charge centroid.
    """
    if basis.dim != 3:
        raise ValueError("the Coulomb kernel needs a three-dimensional basis")
    modes = basis.to_modes(np.asarray(rho, dtype=float))
    k2 = basis.kmag**2
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = np.where(k2 > 0, 4 * np.pi / k2, 0.0)
    energy = 0.5 * float(np.sum(kernel * np.abs(modes) ** 2))
    if not isolated:
        return energy
    q = float(basis.integrate(rho))
    weight = np.abs(rho)
    center = np.zeros(3)
    for axis in range(3):
        phase = np.exp(2j * np.pi * basis.positions[axis] / basis.extent)
        center[axis] = (np.angle(np.sum(weight * phase)) % (2 * np.pi)) * basis.extent / (2 * np.pi)
    r2 = np.sum(basis.centered_offsets(center) ** 2, axis=0)
    second = float(basis.integrate(rho * r2))
    L = basis.extent
    return energy + q**2 * MADELUNG_SIMPLE_CUBIC / (2 * L) - 2 * np.pi * q * second / (3 * L**3)


def gaussian_charge(basis: ModeBasis, charge: float, width: float, center=None) -> np.ndarray:
    """Normalised Gaussian charge density of standard deviation ``width``."""
    center = np.full(basis.dim, basis.extent / 2) if center is None else np.asarray(center, dtype=float)
    r2 = np.sum(basis.centered_offsets(center) ** 2, axis=0)
    return charge * np.exp(-r2 / (2 * width**2)) / (2 * np.pi * width**2) ** (basis.dim / 2)


def point_charge(basis: ModeBasis, charge: float, site=None) -> np.ndarray:
    """All charge on one lattice site (density charge / cell volume)."""
    rho = np.zeros(basis.shape)
    site = tuple([basis.points_per_axis // 2] * basis.dim) if site is None else tuple(site)
    rho[site] = charge / basis.cell_volume
    return rho


def gaussian_self_energy_closed_form(charge: float, width: float) -> float:
    return charge**2 / (2 * width * np.sqrt(np.pi))


def gaussian_self_energy_quadrature(charge: float, width: float) -> float:
    """(1/2) integral rho phi d^3x with phi(r) = q erf(r / sqrt2 width) / r, by radial quadrature."""
    norm = charge / (2 * np.pi * width**2) ** 1.5

    def integrand(r):
        rho = norm * np.exp(-(r**2) / (2 * width**2))
        phi = charge * special.erf(r / (np.sqrt(2) * width)) / r if r > 0 else charge * np.sqrt(2 / np.pi) / width
        return 4 * np.pi * r**2 * rho * phi

    value, _ = integrate.quad(integrand, 0, 20 * width, epsabs=0, epsrel=1e-13, limit=200)
    return 0.5 * value


def refinement_study(density, bases, isolated: bool = True) -> list[tuple[int, float]]:
    """Self-energy of ``density(basis)`` on each basis; rows of (points_per_axis, U)."""
    return [(b.points_per_axis, coulomb_self_energy(density(b), b, isolated)) for b in bases]
