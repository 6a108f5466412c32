"""Classical free Dirac field on a periodic lattice.

The field is a four-component complex array ``(4, *lattice)``.  Spatial
derivatives are spectral; time derivatives come from the equation of motion
``i hbar d psi/dt = (c alpha.p + beta m c^2) psi`` applied in mode space, so
the evolution and every derived observable are exact for band-limited data.

Dirac representation throughout: beta = diag(1, 1, -1, -1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .lorentz import boost_matrix, boost_wavevector, check_velocity, four_vector_mismatch, rest_frame_events
from .modebasis import ModeBasis, PhysicalConstants, omega_massive

PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]],
    dtype=complex,
)

SPIN_STATES = {"up": np.array([1, 0], dtype=complex), "down": np.array([0, 1], dtype=complex)}


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DiracMatrices:
    alpha: np.ndarray  # (3, 4, 4)
    beta: np.ndarray  # (4, 4)
    sigma: np.ndarray  # (3, 4, 4), block-diagonal Pauli matrices

    @property
    def beta_sigma(self) -> np.ndarray:
        return self.beta @ self.sigma

    @property
    def beta_alpha(self) -> np.ndarray:
        return self.beta @ self.alpha


def dirac_matrices() -> DiracMatrices:
    zero = np.zeros((2, 2), dtype=complex)
    eye = np.eye(2, dtype=complex)
    alpha = np.array([np.block([[zero, s], [s, zero]]) for s in PAULI])
    sigma = np.array([np.block([[s, zero], [zero, s]]) for s in PAULI])
    beta = np.block([[eye, zero], [zero, -eye]])
    return DiracMatrices(alpha=_readonly(alpha), beta=_readonly(beta), sigma=_readonly(sigma))


DIRAC = dirac_matrices()


# ---------------------------------------------------------------------------
# field container


@dataclass(frozen=True, eq=False)
class SpinorField:
    """Immutable four-component field in position or mode representation."""

    basis: ModeBasis
    values: np.ndarray
    rep: str = "position"

    def __post_init__(self):
        if self.rep not in ("position", "mode"):
            raise ValueError(f"unknown representation {self.rep!r}")
        values = np.array(self.values, dtype=complex)
        if values.shape != (4,) + self.basis.shape:
            raise ValueError(f"spinor values must have shape {(4,) + self.basis.shape}, got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def to_modes(self) -> "SpinorField":
        if self.rep == "mode":
            return self
        return SpinorField(self.basis, self.basis.to_modes(self.values), "mode")

    def to_position(self) -> "SpinorField":
        if self.rep == "position":
            return self
        return SpinorField(self.basis, self.basis.to_position(self.values), "position")

    def as_rep(self, rep: str) -> "SpinorField":
        return self.to_modes() if rep == "mode" else self.to_position()

    def norm(self) -> float:
        """Integral of psi^dagger psi (identical in both representations)."""
        if self.rep == "mode":
            return float(np.sum(np.abs(self.values) ** 2))
        return float(self.basis.integrate(np.sum(np.abs(self.values) ** 2, axis=0)))

    def __add__(self, other: "SpinorField") -> "SpinorField":
        if other.basis != self.basis:
            raise ValueError("fields live on different bases")
        return SpinorField(self.basis, self.values + other.as_rep(self.rep).values, self.rep)

    def scaled(self, factor: complex) -> "SpinorField":
        return SpinorField(self.basis, factor * self.values, self.rep)


def wavevectors3(basis: ModeBasis) -> np.ndarray:
    return basis.kgrid3


def offsets3(basis: ModeBasis, center) -> np.ndarray:
    center = np.asarray(center, dtype=float).reshape(-1)[: basis.dim]
    r = np.zeros((3,) + basis.shape)
    r[: basis.dim] = basis.centered_offsets(center)
    return r


def random_field(basis: ModeBasis, rng: np.random.Generator, band: float = 0.5) -> SpinorField:
    """Random complex field with modes restricted to ``|n| < band * N/2`` on every axis."""
    n = basis.points_per_axis
    cut = band * n / 2
    ints = np.rint(basis.kgrid * basis.extent / (2 * np.pi))
    keep = np.all(np.abs(ints) < cut, axis=0)
    modes = (rng.standard_normal((4,) + basis.shape) + 1j * rng.standard_normal((4,) + basis.shape)) * keep
    field = SpinorField(basis, modes, "mode")
    return field.scaled(1 / np.sqrt(field.norm())).to_position()


# ---------------------------------------------------------------------------
# mode-space machinery


def apply_mode_hamiltonian(modes: np.ndarray, basis: ModeBasis, constants: PhysicalConstants) -> np.ndarray:
    """(c alpha.hbar k + beta m c^2) applied mode by mode; ``modes`` has shape ``(4, *lattice)``."""
    c, hbar, m = constants.c, constants.hbar, constants.m
    k3 = wavevectors3(basis)
    out = c * hbar * np.einsum("jab,j...,b...->a...", DIRAC.alpha, k3, modes)
    out += m * c**2 * np.einsum("ab,b...->a...", DIRAC.beta, modes)
    return out


def mode_energies(basis: ModeBasis, constants: PhysicalConstants) -> np.ndarray:
    return constants.hbar * omega_massive(basis.kmag, constants)


def spinor_frame(k, constants: PhysicalConstants) -> np.ndarray:
    """Columns u(k, up), u(k, down), v(k, up), v(k, down) for wavevectors on the last axis.

    ``k`` has shape ``(..., 3)``; the result has shape ``(..., 4, 4)`` and is unitary.
    """
    k = np.asarray(k, dtype=float)
    c, hbar, m = constants.c, constants.hbar, constants.m
    energy = hbar * omega_massive(np.linalg.norm(k, axis=-1), constants)
    rest = m * c**2
    norm = np.sqrt((energy + rest) / (2 * energy))
    sigma_p = np.einsum("...j,jab->...ab", c * hbar * k, PAULI) / (energy + rest)[..., None, None]
    frame = np.zeros(k.shape[:-1] + (4, 4), dtype=complex)
    eye = np.eye(2)
    frame[..., :2, :2] = eye
    frame[..., 2:, :2] = sigma_p
    frame[..., :2, 2:] = -sigma_p
    frame[..., 2:, 2:] = eye
    return frame * norm[..., None, None]


@dataclass(frozen=True)
class PlaneWaveSpinor:
    wavevector: np.ndarray
    branch: int  # +1 positive frequency, -1 negative frequency
    spin: str
    amplitude: np.ndarray


def plane_wave_spinors(k, constants: PhysicalConstants) -> list[PlaneWaveSpinor]:
    """u(k, up), u(k, down), v(k, up), v(k, down) with eigenvalues +E, +E, -E, -E."""
    k3 = np.zeros(3)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    k3[: k.size] = k
    frame = spinor_frame(k3, constants)
    labels = [(1, "up"), (1, "down"), (-1, "up"), (-1, "down")]
    return [
        PlaneWaveSpinor(_readonly(k3), branch, spin, _readonly(frame[:, col]))
        for col, (branch, spin) in enumerate(labels)
    ]


def branch_amplitudes(field: SpinorField, constants: PhysicalConstants) -> np.ndarray:
    """Coefficients on (u_up, u_down, v_up, v_down) at every mode, shape ``(4, *lattice)``."""
    modes = field.to_modes().values
    frame = spinor_frame(np.moveaxis(wavevectors3(field.basis), 0, -1), constants)
    return np.einsum("...ba,b...->a...", frame.conj(), modes)


def split_frequencies(field: SpinorField, constants: PhysicalConstants) -> tuple[SpinorField, SpinorField]:
    """Project onto positive- and negative-frequency parts, returned in the input representation."""
    modes = field.to_modes().values
    energy = mode_energies(field.basis, constants)
    h_modes = apply_mode_hamiltonian(modes, field.basis, constants) / energy
    pos = SpinorField(field.basis, 0.5 * (modes + h_modes), "mode")
    neg = SpinorField(field.basis, 0.5 * (modes - h_modes), "mode")
    return pos.as_rep(field.rep), neg.as_rep(field.rep)


def evolve_free(field: SpinorField, t: float, constants: PhysicalConstants) -> SpinorField:
    """Exact free evolution: e^{-i E t / hbar} on positive and e^{+i E t / hbar} on negative modes."""
    modes = field.to_modes().values
    energy = mode_energies(field.basis, constants)
    theta = energy * t / constants.hbar
    h_modes = apply_mode_hamiltonian(modes, field.basis, constants) / energy
    evolved = np.cos(theta) * modes - 1j * np.sin(theta) * h_modes
    return SpinorField(field.basis, evolved, "mode").as_rep(field.rep)


def time_derivative(field: SpinorField, constants: PhysicalConstants) -> SpinorField:
    """d psi / dt from the Dirac equation, in position representation."""
    modes = field.to_modes().values
    h_modes = apply_mode_hamiltonian(modes, field.basis, constants)
    return SpinorField(field.basis, -1j / constants.hbar * h_modes, "mode").to_position()


def spatial_gradient(field: SpinorField) -> np.ndarray:
    """Spectral gradient, shape ``(3, 4, *lattice)``; absent axes are zero."""
    basis = field.basis
    modes = field.to_modes().values
    k3 = wavevectors3(basis)
    return basis.to_position(1j * k3[:, None] * modes[None])


# ---------------------------------------------------------------------------
# densities


def _bilinear(psi: np.ndarray, matrices: np.ndarray, phi: np.ndarray | None = None) -> np.ndarray:
    """psi^dagger M_j phi for a stack of matrices ``(n, 4, 4)``."""
    phi = psi if phi is None else phi
    return np.einsum("a...,jab,b...->j...", psi.conj(), matrices, phi)


def probability_densities(field: SpinorField, constants: PhysicalConstants) -> tuple[np.ndarray, np.ndarray]:
    """rho^p = psi^dagger psi and J^p = c psi^dagger alpha psi on the lattice."""
    psi = field.to_position().values
    rho = np.sum(np.abs(psi) ** 2, axis=0)
    current = constants.c * _bilinear(psi, DIRAC.alpha).real
    return rho, current


def charge_current(
    field: SpinorField, constants: PhysicalConstants, convention: str = "standard"
) -> tuple[np.ndarray, np.ndarray]:
    """Charge and current densities.

    ``standard``: rho^q = -e psi^dagger psi, J = -e c psi^dagger alpha psi.
    ``positron``: negative-frequency modes carry the opposite sign,
    rho^q = -e (psi_+^dagger psi_+ - psi_-^dagger psi_-), and likewise for J;
    interference between the two branches is dropped.
    """
    e = constants.e
    if convention == "standard":
        rho, current = probability_densities(field, constants)
        return -e * rho, -e * current
    if convention != "positron":
        raise ValueError(f"unknown charge convention {convention!r}")
    pos, neg = split_frequencies(field, constants)
    rho_p, j_p = probability_densities(pos, constants)
    rho_n, j_n = probability_densities(neg, constants)
    return -e * (rho_p - rho_n), -e * (j_p - j_n)


def energy(field: SpinorField, constants: PhysicalConstants, convention: str = "standard") -> float:
    """Total field energy as a mode-space quadratic form.

    ``standard`` gives sum E(k) (|psi_+|^2 - |psi_-|^2); ``flipped`` counts the
    negative-frequency part with positive energy.
    """
    if convention not in ("standard", "flipped"):
        raise ValueError(f"unknown energy convention {convention!r}")
    pos, neg = split_frequencies(field.to_modes(), constants)
    e_k = mode_energies(field.basis, constants)
    plus = np.sum(e_k * np.sum(np.abs(pos.values) ** 2, axis=0))
    minus = np.sum(e_k * np.sum(np.abs(neg.values) ** 2, axis=0))
    return float(plus - minus if convention == "standard" else plus + minus)


def energy_density(field: SpinorField, constants: PhysicalConstants) -> np.ndarray:
    """Symmetric T^00 = Re(psi^dagger H psi)."""
    psi = field.to_position().values
    h_psi = field.basis.to_position(apply_mode_hamiltonian(field.to_modes().values, field.basis, constants))
    return np.einsum("a...,a...->...", psi.conj(), h_psi).real


def momentum_density(field: SpinorField, constants: PhysicalConstants) -> np.ndarray:
    """Momentum density from the symmetrised (Belinfante) energy-momentum tensor.

    g_j = T^{0j} / c with
    T^{0j} = (i hbar c / 4)[(d_j psi^dagger) psi - psi^dagger d_j psi]
           + (i hbar / 4)[psi^dagger alpha_j d_t psi - (d_t psi^dagger) alpha_j psi],
    i.e. g = (hbar/2) Im(psi^dagger grad psi) - (hbar / 2c) Im(psi^dagger alpha d_t psi).
    The canonical tensor differs by (hbar/4) curl(psi^dagger Sigma psi) - (hbar/2) Im(...)
    terms that integrate to the same total momentum.
    """
    hbar, c = constants.hbar, constants.c
    psi = field.to_position().values
    grad = spatial_gradient(field)
    dpsi = time_derivative(field, constants).values
    first = 0.5 * hbar * np.einsum("a...,ja...->j...", psi.conj(), grad).imag
    second = -0.5 * hbar / c * _bilinear(psi, DIRAC.alpha, dpsi).imag
    return first + second


def _check_top_modes(field: SpinorField, threshold: float) -> None:
    modes = field.to_modes().values
    power = np.sum(np.abs(modes) ** 2, axis=0)
    total = power.sum()
    top = power[field.basis.nyquist_mask].sum()
    if total > 0 and top > threshold * total:
        raise ValueError(
            f"field has {top / total:.3e} of its norm in the Nyquist modes (threshold {threshold:.1e}); "
            "spectral derivatives would alias"
        )


def gordon_decompose(
    field: SpinorField, constants: PhysicalConstants, top_mode_threshold: float = 1e-10
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split J = -e c psi^dagger alpha psi into convection, spin (curl) and time-derivative terms.

    J = (i e hbar / 2m){psi^dagger beta grad psi - (grad psi^dagger) beta psi}
        - (e hbar / 2m) curl(psi^dagger beta Sigma psi)
        + (i e hbar / 2mc) d_t(psi^dagger beta alpha psi)

    The curl is expanded with the product rule so that the identity holds
    pointwise on the lattice, not just up to aliasing of the bilinears.
    """
    _check_top_modes(field, top_mode_threshold)
    e, hbar, m, c = constants.e, constants.hbar, constants.m, constants.c
    psi = field.to_position().values
    grad = spatial_gradient(field)
    dpsi = time_derivative(field, constants).values

    beta_grad = np.einsum("a...,ab,jb...->j...", psi.conj(), DIRAC.beta, grad)
    convection = -(e * hbar / m) * beta_grad.imag

    # ds[j, k] = d_j (psi^dagger beta Sigma_k psi)
    ds = 2 * np.einsum("a...,kab,jb...->jk...", psi.conj(), DIRAC.beta_sigma, grad).real
    curl = np.stack([ds[1, 2] - ds[2, 1], ds[2, 0] - ds[0, 2], ds[0, 1] - ds[1, 0]])
    spin = -(e * hbar / (2 * m)) * curl

    d_dt = _bilinear(dpsi, DIRAC.beta_alpha, psi) + _bilinear(psi, DIRAC.beta_alpha, dpsi)
    time_term = (1j * e * hbar / (2 * m * c) * d_dt).real
    return convection, spin, time_term


# ---------------------------------------------------------------------------
# packets, moments and flow velocities


def build_gaussian_packet(
    basis: ModeBasis,
    constants: PhysicalConstants,
    center,
    width: float,
    momentum=(0.0, 0.0, 0.0),
    spin: str = "up",
    branch: int = 1,
) -> SpinorField:
    """Unit-norm packet built from u(k, spin) with Gaussian mode weights.

    ``width`` is the standard deviation of the charge density, so the mode
    weights are exp(-|k - p0/hbar|^2 width^2).  ``branch=-1`` uses the
    negative-frequency spinors v(k, spin) instead.
    """
    if width <= 2 * basis.spacing:
        raise ValueError(f"packet width {width} is under-resolved by lattice spacing {basis.spacing}")
    if basis.extent < 8 * width:
        raise ValueError(f"packet width {width} does not fit in box of extent {basis.extent}")
    if spin not in SPIN_STATES:
        raise ValueError(f"spin must be 'up' or 'down', got {spin!r}")
    if branch not in (1, -1):
        raise ValueError(f"branch must be +1 or -1, got {branch!r}")
    k3 = wavevectors3(basis)
    p0 = np.zeros(3)
    p0[: len(np.atleast_1d(momentum))] = np.atleast_1d(momentum)
    x0 = np.zeros(3)
    x0[: len(np.atleast_1d(center))] = np.atleast_1d(center)
    dk = k3 - (p0 / constants.hbar).reshape((3,) + (1,) * basis.dim)
    weight = np.exp(-np.sum(dk**2, axis=0) * width**2) * np.exp(-1j * np.einsum("j,j...->...", x0, k3))
    column = (0 if spin == "up" else 1) + (0 if branch == 1 else 2)
    frame = spinor_frame(np.moveaxis(k3, 0, -1), constants)
    spinors = np.moveaxis(frame[..., :, column], -1, 0)
    field = SpinorField(basis, weight * spinors, "mode")
    return field.scaled(1 / np.sqrt(field.norm())).to_position()


def charge_centroid(basis: ModeBasis, density: np.ndarray) -> np.ndarray:
    """Periodic (circular-mean) centroid of a non-negative density."""
    center = np.zeros(basis.dim)
    weight = density.sum()
    for axis in range(basis.dim):
        phase = np.exp(2j * np.pi * basis.positions[axis] / basis.extent)
        angle = np.angle(np.sum(density * phase) / weight)
        center[axis] = (angle % (2 * np.pi)) * basis.extent / (2 * np.pi)
    return center


class SpinObservables(NamedTuple):
    angular_momentum: np.ndarray
    magnetic_moment: np.ndarray


def spin_observables(
    field: SpinorField, constants: PhysicalConstants, boundary_threshold: float = 1e-6
) -> SpinObservables:
    """Total angular momentum and magnetic moment about the charge centroid.

    L = integral r x g, with g the symmetrised momentum density, and
    m = (1/2c) integral r x J with J = -e c psi^dagger alpha psi.
    """
    basis = field.basis
    rho, _ = probability_densities(field, constants)
    _, current = charge_current(field, constants)
    center = charge_centroid(basis, rho)
    r = offsets3(basis, center)
    edge = np.max(np.abs(r[: basis.dim]), axis=0) >= basis.extent / 2 - basis.spacing
    boundary = rho[edge].sum() / rho.sum()
    if boundary > boundary_threshold:
        warnings.warn(
            f"{boundary:.2e} of the density sits at the box boundary; moments are unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    g = momentum_density(field, constants)
    ang = basis.integrate(np.cross(r, g, axis=0))
    mag = basis.integrate(np.cross(r, current, axis=0)) / (2 * constants.c)
    return SpinObservables(ang, mag)


class FlowVelocities(NamedTuple):
    charge: np.ndarray  # (3, *lattice), NaN where masked
    energy: np.ndarray  # (3, *lattice), NaN where masked
    superluminal_energy_sites: int


def flow_velocities(field: SpinorField, constants: PhysicalConstants, floor: float = 1e-10) -> FlowVelocities:
    """Charge velocity J/rho and energy velocity c^2 g / u.

    Sites with rho^p below ``floor * max(rho^p)`` are masked in both; the
    energy velocity additionally masks sites with |u| below ``floor * max|u|``.
    """
    c = constants.c
    rho, current = probability_densities(field, constants)
    masked = rho < floor * rho.max()
    with np.errstate(divide="ignore", invalid="ignore"):
        v_charge = np.where(masked, np.nan, current / rho)
        u = energy_density(field, constants)
        g = momentum_density(field, constants)
        masked_e = masked | (np.abs(u) < floor * np.abs(u).max())
        v_energy = np.where(masked_e, np.nan, c**2 * g / u)
    speed = np.linalg.norm(np.where(masked_e, 0.0, v_energy), axis=0)
    count = int(np.sum(speed > c * (1 + 1e-12)))
    return FlowVelocities(v_charge, v_energy, count)


# ---------------------------------------------------------------------------
# analytic plane-wave superpositions and boosts


def spinor_boost(v, c: float = 1.0) -> np.ndarray:
    """S(Lambda) = cosh(eta/2) - sinh(eta/2) alpha.n for a passive boost with velocity v."""
    v = check_velocity(v, c)
    speed = np.linalg.norm(v)
    if speed == 0:
        return np.eye(4, dtype=complex)
    n = v / speed
    eta = np.arctanh(speed / c)
    alpha_n = np.einsum("j,jab->ab", n, DIRAC.alpha)
    return np.cosh(eta / 2) * np.eye(4) - np.sinh(eta / 2) * alpha_n


@dataclass(frozen=True)
class DiracPlaneWaves:
    """psi(x, t) = sum_j w_j exp(i (k_j.x - omega_j t)) with on-shell spinors w_j."""

    wavevectors: np.ndarray  # (n, 3)
    spinors: np.ndarray  # (n, 4), amplitudes included
    omegas: np.ndarray  # (n,), signed angular frequencies

    @classmethod
    def from_modes(cls, terms, constants: PhysicalConstants) -> "DiracPlaneWaves":
        """``terms`` is an iterable of ``(k, branch, spin, amplitude)``."""
        ks, ws, omegas = [], [], []
        for k, branch, spin, amplitude in terms:
            spinors = plane_wave_spinors(k, constants)
            chosen = next(s for s in spinors if s.branch == branch and s.spin == spin)
            ks.append(chosen.wavevector)
            ws.append(amplitude * chosen.amplitude)
            omegas.append(branch * omega_massive(np.linalg.norm(chosen.wavevector), constants))
        return cls(np.array(ks), np.array(ws), np.array(omegas, dtype=float))

    @classmethod
    def from_field(cls, field: SpinorField, constants: PhysicalConstants, tol: float = 1e-12) -> "DiracPlaneWaves":
        """Exact plane-wave form of a lattice field with few occupied modes."""
        basis = field.basis
        amps = branch_amplitudes(field, constants) / np.sqrt(basis.volume)
        k3 = wavevectors3(basis)
        terms = []
        for col, (branch, spin) in enumerate([(1, "up"), (1, "down"), (-1, "up"), (-1, "down")]):
            for idx in zip(*np.nonzero(np.abs(amps[col]) > tol)):
                terms.append((k3[(slice(None),) + idx], branch, spin, amps[(col,) + idx]))
        return cls.from_modes(terms, constants)

    def evaluate(self, x, t) -> np.ndarray:
        """Spinor values at points ``x`` of shape ``(..., 3)``; ``t`` broadcasts against them."""
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        phase = np.exp(1j * (x @ self.wavevectors.T - t[..., None] * self.omegas))
        return phase @ self.spinors

    def densities(self, x, t, constants: PhysicalConstants) -> np.ndarray:
        """(c rho^p, J^p) at the given events, shape ``(..., 4)``."""
        psi = self.evaluate(x, t)
        rho = np.sum(np.abs(psi) ** 2, axis=-1)
        current = constants.c * np.einsum("...a,jab,...b->...j", psi.conj(), DIRAC.alpha, psi).real
        return np.concatenate([constants.c * rho[..., None], current], axis=-1)

    def boosted(self, v, constants: PhysicalConstants) -> "DiracPlaneWaves":
        """The same solution seen from a frame moving with velocity ``v``."""
        s = spinor_boost(v, constants.c)
        k_new, omega_new = boost_wavevector(self.wavevectors, self.omegas, v, constants.c)
        return DiracPlaneWaves(k_new, self.spinors @ s.T, omega_new)


@dataclass(frozen=True)
class CovarianceReport:
    velocity: np.ndarray
    mismatch: float
    points: int


def covariance_report(
    waves: DiracPlaneWaves,
    boosted: DiracPlaneWaves,
    v,
    constants: PhysicalConstants,
    rng: np.random.Generator | None = None,
    points: int = 256,
    spread: float = 10.0,
) -> CovarianceReport:
    """Compare (c rho^p, J^p) in the boosted frame with the four-vector transform of rest-frame densities."""
    rng = np.random.default_rng(0) if rng is None else rng
    lam = boost_matrix(v, constants.c)
    x_prime = rng.uniform(-spread, spread, size=(points, 3))
    t_prime = rng.uniform(-spread, spread, size=points) / constants.c
    t_rest, x_rest = rest_frame_events(v, t_prime, x_prime, constants.c)
    expected = waves.densities(x_rest, t_rest, constants) @ lam.T
    got = boosted.densities(x_prime, t_prime, constants)
    return CovarianceReport(np.asarray(v, dtype=float), four_vector_mismatch(got, expected), points)


def boost(
    field, v, constants: PhysicalConstants, rng: np.random.Generator | None = None
) -> tuple[DiracPlaneWaves, CovarianceReport]:
    """Boost an analytic plane-wave superposition (or a few-mode lattice field) and report covariance."""
    check_velocity(v, constants.c)
    waves = field if isinstance(field, DiracPlaneWaves) else DiracPlaneWaves.from_field(field, constants)
    boosted = waves.boosted(v, constants)
    return boosted, covariance_report(waves, boosted, v, constants, rng)
