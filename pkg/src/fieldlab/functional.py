"""Wave functionals of free bosonic fields on finite mode sets.

Each retained mode is a unit-mass oscillator with Hamiltonian
(pi^2 + omega^2 q^2) / 2, so a wave functional is a coefficient tensor over
per-mode Hermite functions.  Evaluating it on a field configuration (one
real amplitude q_k per mode) gives an ordinary complex number.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fock import FockState, ModeSet, TruncationError
from .modebasis import ModeBasis, PhysicalConstants, omega_massive

MAX_TENSOR_SIZE = 2**24


@dataclass(frozen=True)
class OscillatorBasis:
    omegas: tuple
    labels: tuple = ()
    depth: int = 8
    hbar: float = 1.0

    def __post_init__(self):
        omegas = tuple(float(w) for w in self.omegas)
        if not omegas:
            raise ValueError("an oscillator basis needs at least one mode")
        if any(not w > 0 for w in omegas):
            raise ValueError(f"every retained mode needs omega > 0, got {omegas}")
        labels = tuple(self.labels) if self.labels else tuple(range(len(omegas)))
        if len(labels) != len(omegas):
            raise ValueError("labels and omegas differ in length")
        if self.depth < 1:
            raise ValueError("depth must be positive")
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return len(self.omegas)

    @property
    def shape(self) -> tuple:
        return (self.depth,) * self.size

    @classmethod
    def from_modes(cls, modes: ModeSet, depth: int = 8, hbar: float = 1.0) -> "OscillatorBasis":
        if modes.fermionic:
            raise ValueError("wave functionals here are for bosonic mode sets")
        return cls(tuple(m.omega for m in modes), tuple(m.key for m in modes), depth, hbar)

    def to_dict(self) -> dict:
        return {"omegas": list(self.omegas), "labels": [_jsonable(x) for x in self.labels], "depth": self.depth, "hbar": self.hbar}


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    if isinstance(x, (np.integer, np.floating)):
        return x.item()
    return x


def oscillator_functions(depth: int, q, omega: float, hbar: float = 1.0) -> np.ndarray:
    """Normalised eigenfunctions psi_n(q), n < depth, shape ``(depth, *q.shape)``.

    Uses the stable three-term recurrence for Hermite functions.
    """
    q = np.asarray(q, dtype=float)
    xi = q * math.sqrt(omega / hbar)
    out = np.empty((depth,) + q.shape)
    out[0] = (omega / (math.pi * hbar)) ** 0.25 * np.exp(-0.5 * xi**2)
    if depth > 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for n in range(2, depth):
        out[n] = math.sqrt(2.0 / n) * xi * out[n - 1] - math.sqrt((n - 1) / n) * out[n - 2]
    return out


@dataclass(frozen=True, eq=False)
class WaveFunctional:
    basis: OscillatorBasis
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex)
        if c.shape != self.basis.shape:
            raise ValueError(f"coefficient tensor has shape {c.shape}, expected {self.basis.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coefficients) ** 2)))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm() - 1) < 1e-12

    def normalized(self) -> "WaveFunctional":
        return WaveFunctional(self.basis, self.coefficients / self.norm())

    def __add__(self, other: "WaveFunctional") -> "WaveFunctional":
        _check_same_basis(self, other)
        return WaveFunctional(self.basis, self.coefficients + other.coefficients)

    def scaled(self, factor: complex) -> "WaveFunctional":
        return WaveFunctional(self.basis, self.coefficients * factor)


def _check_same_basis(a: WaveFunctional, b: WaveFunctional) -> None:
    if a.basis != b.basis:
        raise ValueError("functionals live on different oscillator bases")


def _empty_tensor(basis: OscillatorBasis) -> np.ndarray:
    if basis.depth**basis.size > MAX_TENSOR_SIZE:
        raise ValueError(f"coefficient tensor {basis.depth}^{basis.size} exceeds {MAX_TENSOR_SIZE} entries")
    return np.zeros(basis.shape, dtype=complex)


def ground_state(basis: OscillatorBasis) -> WaveFunctional:
    """Product of oscillator vacua, proportional to exp(-sum omega_k q_k^2 / 2 hbar)."""
    return excited_state(basis, (0,) * basis.size)


def excited_state(basis: OscillatorBasis, occupation) -> WaveFunctional:
    occupation = tuple(occupation)
    if any(n >= basis.depth for n in occupation):
        raise TruncationError(f"occupation {occupation} exceeds Hermite depth {basis.depth}")
    c = _empty_tensor(basis)
    c[occupation] = 1.0
    return WaveFunctional(basis, c)


def random_functional(basis: OscillatorBasis, rng: np.random.Generator) -> WaveFunctional:
    c = rng.standard_normal(basis.shape) + 1j * rng.standard_normal(basis.shape)
    return WaveFunctional(basis, c).normalized()


def evaluate(psi: WaveFunctional, configuration) -> np.ndarray:
    """Psi[q] for configurations of shape ``(..., M)``."""
    basis = psi.basis
    q = np.asarray(configuration, dtype=float)
    if q.shape[-1] != basis.size:
        raise ValueError(f"configuration needs {basis.size} mode amplitudes, got {q.shape[-1]}")
    batch = q.shape[:-1]
    flat = q.reshape(-1, basis.size)
    d = basis.depth
    out = psi.coefficients.reshape(1, -1)
    for k in range(basis.size):
        funcs = oscillator_functions(d, flat[:, k], basis.omegas[k], basis.hbar)  # (D, B)
        out = out.reshape(out.shape[0], d, -1)
        out = np.einsum("bnr,nb->br", out, funcs) if out.shape[0] > 1 else np.einsum("nr,nb->br", out[0], funcs)
    return out.reshape(batch)


def probability_density(psi: WaveFunctional, configuration) -> np.ndarray:
    return np.abs(evaluate(psi, configuration)) ** 2


def expected_energy(psi: WaveFunctional, normal_ordered: bool = True) -> float:
    """<H> with H = sum hbar omega_k (n_k + 1/2), dropping the 1/2 when ``normal_ordered``."""
    basis = psi.basis
    weights = np.abs(psi.coefficients) ** 2
    energy = 0.0
    for k, w in enumerate(basis.omegas):
        n = np.arange(basis.depth).reshape((1,) * k + (-1,) + (1,) * (basis.size - k - 1))
        energy += basis.hbar * w * float(np.sum(weights * n))
    energy /= float(np.sum(weights))
    if not normal_ordered:
        energy += 0.5 * basis.hbar * sum(basis.omegas)
    return energy


def _level_energies(basis: OscillatorBasis) -> np.ndarray:
    total = np.zeros(basis.shape)
    for k, w in enumerate(basis.omegas):
        n = np.arange(basis.depth).reshape((1,) * k + (-1,) + (1,) * (basis.size - k - 1))
        total = total + w * n
    return total


def evolve_functional(psi: WaveFunctional, t: float) -> WaveFunctional:
    """Coefficient (n_1, ..., n_M) picks up exp(-i sum n_k omega_k t) (normal-ordered zero)."""
    return WaveFunctional(psi.basis, psi.coefficients * np.exp(-1j * _level_energies(psi.basis) * t))


# ---------------------------------------------------------------------------
# Fock <-> functional


def fock_to_functional(state: FockState, depth: int = 8, hbar: float = 1.0) -> WaveFunctional:
    """Occupation (n_1, ..., n_M) maps to the Hermite product with those indices."""
    basis = OscillatorBasis.from_modes(state.modes, depth, hbar)
    c = _empty_tensor(basis)
    for config, amp in state.amplitudes.items():
        if any(n >= depth for n in config):
            raise TruncationError(f"occupation {config} exceeds Hermite depth {depth}")
        c[config] += amp
    return WaveFunctional(basis, c)


def functional_to_fock(psi: WaveFunctional, modes: ModeSet) -> FockState:
    if len(modes) != psi.basis.size:
        raise ValueError("mode count mismatch")
    amps = {tuple(int(i) for i in idx): psi.coefficients[idx] for idx in zip(*np.nonzero(psi.coefficients))}
    return FockState(modes, amps)


@lru_cache(maxsize=256)
def _overlap_matrix(depth1: int, omega1: float, depth2: int, omega2: float, hbar: float, nodes: int) -> np.ndarray:
    """O[n, m] = integral psi_n(q; omega1) psi_m(q; omega2) dq by Gauss-Hermite quadrature."""
    x, w = np.polynomial.hermite.hermgauss(nodes)
    scale = math.sqrt(2 * hbar / (omega1 + omega2))
    q = x * scale
    f1 = oscillator_functions(depth1, q, omega1, hbar)
    f2 = oscillator_functions(depth2, q, omega2, hbar)
    weight = w * np.exp(x**2) * scale
    return np.einsum("ni,mi,i->nm", f1, f2, weight)


def inner_product(psi1: WaveFunctional, psi2: WaveFunctional, nodes: int = 64) -> complex:
    """<Psi1|Psi2> as a field-space integral, one Gauss-Hermite quadrature per mode.

    The two functionals may use different mode frequencies (same mode count).
    """
    b1, b2 = psi1.basis, psi2.basis
    if b1.size != b2.size or b1.hbar != b2.hbar:
        raise ValueError("functionals need the same mode count and hbar")
    if nodes < 64:
        raise ValueError("use at least 64 quadrature nodes")
    out = psi2.coefficients
    for k in range(b1.size):
        o = _overlap_matrix(b1.depth, b1.omegas[k], b2.depth, b2.omegas[k], b1.hbar, nodes)
        out = np.moveaxis(np.tensordot(o, out, axes=([1], [k])), 0, k)
    return complex(np.vdot(psi1.coefficients, out))


# ---------------------------------------------------------------------------
# sampling


def sample_configurations(
    psi: WaveFunctional, count: int, rng: np.random.Generator, grid_points: int = 4001
) -> np.ndarray:
    """Draw configurations from |Psi[q]|^2, shape ``(count, M)``.

    Modes are drawn in order from their exact conditional densities (the
    oscillator functions are orthonormal, so the marginals are sums of
    squared partial contractions); each 1D draw inverts a fine-grid CDF.
    """
    basis = psi.basis
    grids = []
    funcs = []
    for w in basis.omegas:
        half = math.sqrt(basis.hbar / w) * (math.sqrt(2 * basis.depth + 1) + 8)
        g = np.linspace(-half, half, grid_points)
        grids.append(g)
        funcs.append(oscillator_functions(basis.depth, g, w, basis.hbar))
    nz = np.nonzero(psi.coefficients)
    if len(nz[0]) == 1:
        # product state: modes are independent
        out = np.empty((count, basis.size))
        for k in range(basis.size):
            dens = funcs[k][nz[k][0]] ** 2
            out[:, k] = _inverse_cdf(grids[k], dens, rng.random(count))
        return out
    out = np.empty((count, basis.size))
    for s in range(count):
        tensor = psi.coefficients
        for k in range(basis.size):
            # tensor has the modes k..M-1 left
            partial = np.tensordot(funcs[k], tensor, axes=([0], [0]))  # (grid, rest...)
            dens = np.sum(np.abs(partial.reshape(grid_points, -1)) ** 2, axis=1)
            q = _inverse_cdf(grids[k], dens, rng.random(1))[0]
            out[s, k] = q
            tensor = np.tensordot(oscillator_functions(basis.depth, q, basis.omegas[k], basis.hbar), tensor, axes=([0], [0]))
    return out


def _inverse_cdf(grid: np.ndarray, density: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(grid))])
    cdf /= cdf[-1]
    return np.interp(u, cdf, grid)


# ---------------------------------------------------------------------------
# inequivalent vacua


def ground_overlap_closed_form(omega1, omega2) -> np.ndarray:
    """sqrt(2 sqrt(omega1 omega2) / (omega1 + omega2)) per mode."""
    omega1 = np.asarray(omega1, dtype=float)
    omega2 = np.asarray(omega2, dtype=float)
    return np.sqrt(2 * np.sqrt(omega1 * omega2) / (omega1 + omega2))


def scalar_mode_wavenumbers(basis: ModeBasis, count: int | None = None) -> np.ndarray:
    """|k| of the real modes of a 1D lattice field, in order: 0, then cos/sin pairs of increasing |k|, Nyquist last."""
    if basis.dim != 1:
        raise ValueError("real scalar mode pairing is implemented on 1D lattices")
    n = basis.points_per_axis
    ks = [0.0]
    for j in range(1, n // 2):
        ks += [2 * np.pi * j / basis.extent] * 2
    ks.append(np.pi * n / basis.extent)
    ks = np.array(ks)
    return ks if count is None else ks[:count]


def field_to_configuration(basis: ModeBasis, values) -> np.ndarray:
    """Real lattice field -> real mode amplitudes q with sum q^2 = integral phi^2.

    For each +/-k doublet phi_k = (a - i b)/sqrt2, phi_{-k} = conj(phi_k),
    giving the cos-like amplitude a and sin-like amplitude b.
    """
    values = np.asarray(values, dtype=float)
    modes = basis.to_modes(values)
    n = basis.points_per_axis
    q = [modes[0].real]
    for j in range(1, n // 2):
        q += [math.sqrt(2) * modes[j].real, -math.sqrt(2) * modes[j].imag]
    q.append(modes[n // 2].real)
    return np.array(q)


def configuration_to_field(basis: ModeBasis, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = basis.points_per_axis
    modes = np.zeros(n, dtype=complex)
    modes[0] = q[0]
    for j in range(1, n // 2):
        a, b = q[2 * j - 1], q[2 * j]
        modes[j] = (a - 1j * b) / math.sqrt(2)
        modes[n - j] = np.conj(modes[j])
    modes[n // 2] = q[-1]
    return basis.to_position(modes).real


def scalar_field_basis(
    basis: ModeBasis, mass: float, count: int | None = None, depth: int = 8, constants: PhysicalConstants | None = None
) -> OscillatorBasis:
    constants = PhysicalConstants() if constants is None else constants
    ks = scalar_mode_wavenumbers(basis, count)
    omegas = omega_massive(ks, constants.with_mass(mass))
    return OscillatorBasis(tuple(omegas), tuple(range(len(ks))), depth, constants.hbar)


@dataclass(frozen=True)
class OverlapStudy:
    mode_counts: np.ndarray
    overlaps: np.ndarray
    mode_factors: np.ndarray
    slope: float
    intercept: float
    r_squared: float


def bogoliubov_overlap(
    mass1: float,
    mass2: float,
    mode_counts,
    basis: ModeBasis | None = None,
    constants: PhysicalConstants | None = None,
    nodes: int = 64,
) -> OverlapStudy:
    """|<ground(m1)|ground(m2)>| restricted to the first M real modes, for each M.

    Each per-mode factor is a Gauss-Hermite quadrature of two oscillator
    vacua; the M-mode overlap is their running product.  A straight line is
    fitted to log(overlap) against M.
    """
    constants = PhysicalConstants() if constants is None else constants
    basis = build_default_overlap_basis() if basis is None else basis
    counts = np.asarray(list(mode_counts), dtype=int)
    if np.any(np.diff(counts) <= 0) or counts[0] < 1:
        raise ValueError("mode counts must be positive and increasing")
    ks = scalar_mode_wavenumbers(basis, int(counts[-1]))
    w1 = omega_massive(ks, constants.with_mass(mass1))
    w2 = omega_massive(ks, constants.with_mass(mass2))
    factors = np.array(
        [_overlap_matrix(1, float(a), 1, float(b), constants.hbar, nodes)[0, 0] for a, b in zip(w1, w2)]
    )
    running = np.cumprod(factors)
    overlaps = np.abs(running[counts - 1])
    logs = np.log(overlaps)
    if len(counts) >= 2 and np.ptp(logs) > 0:
        slope, intercept = np.polyfit(counts, logs, 1)
        resid = logs - (slope * counts + intercept)
        r2 = 1 - np.sum(resid**2) / np.sum((logs - logs.mean()) ** 2)
    else:
        slope, intercept, r2 = 0.0, float(logs[0]), 1.0
    return OverlapStudy(counts, overlaps, factors, float(slope), float(intercept), float(r2))


def build_default_overlap_basis() -> ModeBasis:
    """Long 1D box so the retained modes sit well below the mass scale."""
    return ModeBasis(1, 400.0, 64)


# ---------------------------------------------------------------------------
# electromagnetic functional


def em_oscillator_basis(wavevectors, constants: PhysicalConstants | None = None, depth: int = 8) -> OscillatorBasis:
    """Two transverse polarizations per nonzero wavevector, omega = c|k|."""
    constants = PhysicalConstants() if constants is None else constants
    omegas, labels = [], []
    for k in np.atleast_2d(np.asarray(wavevectors, dtype=float)):
        kk = float(np.linalg.norm(k))
        if kk == 0:
            raise ValueError("the k = 0 mode has no transverse oscillator")
        for pol in (1, 2):
            omegas.append(constants.c * kk)
            labels.append((tuple(float(x) for x in k), pol))
    return OscillatorBasis(tuple(omegas), tuple(labels), depth, constants.hbar)


def em_functional_ground(wavevectors, constants: PhysicalConstants | None = None, depth: int = 8) -> WaveFunctional:
    """Product Gaussian over the transverse vector-potential amplitudes."""
    return ground_state(em_oscillator_basis(wavevectors, constants, depth))


# ---------------------------------------------------------------------------
# serialization


def dumps_functional(psi: WaveFunctional) -> str:
    """``# basis: <json>`` header then ``index,real,imag`` rows for nonzero coefficients."""
    buf = io.StringIO()
    buf.write("# basis: " + json.dumps(psi.basis.to_dict(), sort_keys=True) + "\n")
    buf.write("index,real,imag\n")
    for idx in zip(*np.nonzero(psi.coefficients)):
        a = complex(psi.coefficients[idx])
        buf.write(f"{'-'.join(str(int(i)) for i in idx)},{a.real!r},{a.imag!r}\n")
    return buf.getvalue()


def loads_functional(text: str) -> WaveFunctional:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# basis: "):
        raise ValueError("missing '# basis:' header")
    data = json.loads(lines[0][len("# basis: "):])
    labels = tuple(_tupleize(x) for x in data["labels"])
    basis = OscillatorBasis(tuple(data["omegas"]), labels, data["depth"], data["hbar"])
    c = _empty_tensor(basis)
    for line in lines[2:]:
        idx, re, im = line.split(",")
        c[tuple(int(i) for i in idx.split("-"))] = complex(float(re), float(im))
    return WaveFunctional(basis, c)


def _tupleize(x):
    return tuple(_tupleize(y) for y in x) if isinstance(x, list) else x
