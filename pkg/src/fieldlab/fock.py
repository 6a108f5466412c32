"""Truncated Fock spaces over finite mode sets.

States are sparse maps from occupation tuples to complex amplitudes.  The
position of a mode in :class:`ModeSet` is its canonical index, and fermionic
operators carry the Jordan-Wigner sign (-1)^(occupied modes before it).

Energies and charges are measured from the reference state in which every
negative-branch mode is filled and everything else is empty (the empty state
when there are no negative modes).  That is the normal-ordered free
Hamiltonian H = sum_k hbar omega_k (excitation count of k).
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

SPECIES = ("electron", "positron", "boson")


class TruncationError(ValueError):
    """Raised when a bosonic creation would exceed the occupation cap."""


@dataclass(frozen=True, order=True)
class Mode:
    """One single-particle mode; ``omega`` is the (non-negative) angular frequency magnitude."""

    branch: int = 1
    wavevector: tuple = (0.0,)
    spin: str = ""
    omega: float = 1.0
    species: str = "boson"

    def __post_init__(self):
        object.__setattr__(self, "wavevector", tuple(float(k) for k in np.atleast_1d(self.wavevector)))
        if self.branch not in (1, -1):
            raise ValueError(f"branch must be +1 or -1, got {self.branch}")
        if not self.omega >= 0:
            raise ValueError(f"mode frequency must be non-negative, got {self.omega}")
        if self.species not in SPECIES:
            raise ValueError(f"species must be one of {SPECIES}, got {self.species!r}")

    @property
    def key(self) -> tuple:
        return (self.branch, self.wavevector, self.spin)

    def to_dict(self) -> dict:
        return {
            "branch": self.branch,
            "wavevector": list(self.wavevector),
            "spin": self.spin,
            "omega": self.omega,
            "species": self.species,
        }


@dataclass(frozen=True)
class ModeSet:
    """Modes in canonical order: negative branch first, then wavevector, then spin label."""

    modes: tuple
    statistics: str = "fermionic"
    n_max: int = 8

    def __post_init__(self):
        if self.statistics not in ("bosonic", "fermionic"):
            raise ValueError(f"statistics must be 'bosonic' or 'fermionic', got {self.statistics!r}")
        modes = tuple(sorted(self.modes, key=lambda m: m.key))
        keys = [m.key for m in modes]
        if len(set(keys)) != len(keys):
            raise ValueError("mode labels must be unique")
        if self.statistics == "bosonic" and self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        object.__setattr__(self, "modes", modes)

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    @property
    def fermionic(self) -> bool:
        return self.statistics == "fermionic"

    @property
    def cap(self) -> int:
        return 1 if self.fermionic else self.n_max

    def index(self, mode) -> int:
        if isinstance(mode, (int, np.integer)):
            if not 0 <= mode < len(self.modes):
                raise IndexError(f"mode index {mode} out of range for {len(self.modes)} modes")
            return int(mode)
        for i, m in enumerate(self.modes):
            if m.key == mode.key:
                return i
        raise KeyError(f"mode {mode} is not in this mode set")

    def configurations(self):
        """Every occupation tuple of the truncated space, in lexicographic order."""
        return itertools.product(range(self.cap + 1), repeat=len(self.modes))

    @property
    def dimension(self) -> int:
        return (self.cap + 1) ** len(self.modes)

    def reference(self) -> tuple:
        """Zero-energy, zero-charge configuration: negative-branch modes filled."""
        return tuple(1 if m.branch == -1 else 0 for m in self.modes)

    def to_dict(self) -> dict:
        return {"statistics": self.statistics, "n_max": self.n_max, "modes": [m.to_dict() for m in self.modes]}

    @classmethod
    def from_dict(cls, data: dict) -> "ModeSet":
        modes = [Mode(**m) for m in data["modes"]]
        return cls(tuple(modes), data["statistics"], data.get("n_max", 8))


def boson_modes(omegas, n_max: int = 8) -> ModeSet:
    """Bosonic modes labelled by their position in ``omegas`` (wavevector = index)."""
    return ModeSet(tuple(Mode(wavevector=(float(i),), omega=float(w)) for i, w in enumerate(omegas)), "bosonic", n_max)


def fermion_modes(count: int, omega: float = 1.0) -> ModeSet:
    return ModeSet(
        tuple(Mode(wavevector=(float(i),), omega=omega, species="electron") for i in range(count)), "fermionic"
    )


def dirac_modes(wavenumbers, constants=None, spins=("up",)) -> ModeSet:
    """Electron-field modes on both branches with omega = sqrt(m^2c^4 + hbar^2k^2c^2)/hbar."""
    from .modebasis import PhysicalConstants, omega_massive

    constants = PhysicalConstants() if constants is None else constants
    modes = []
    for k in wavenumbers:
        w = float(omega_massive(abs(k), constants))
        for s in spins:
            for branch in (-1, 1):
                modes.append(Mode(branch, (float(k),), s, w, "electron"))
    return ModeSet(tuple(modes), "fermionic")


@dataclass(frozen=True, eq=False)
class FockState:
    modes: ModeSet
    amplitudes: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        n = len(self.modes)
        for config, amp in self.amplitudes.items():
            config = tuple(int(x) for x in config)
            if len(config) != n:
                raise ValueError(f"configuration {config} has {len(config)} entries for {n} modes")
            if any(x < 0 or x > self.modes.cap for x in config):
                raise ValueError(f"occupation {config} outside 0..{self.modes.cap}")
            amp = complex(amp)
            if amp != 0:
                clean[config] = clean.get(config, 0) + amp
        object.__setattr__(self, "amplitudes", clean)

    @classmethod
    def vacuum(cls, modes: ModeSet) -> "FockState":
        """The empty state (no quanta in any mode)."""
        return cls(modes, {(0,) * len(modes): 1.0})

    @classmethod
    def basis_state(cls, modes: ModeSet, occupation) -> "FockState":
        return cls(modes, {tuple(occupation): 1.0})

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm() - 1) < 1e-12

    def normalized(self) -> "FockState":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero state")
        return self.scaled(1 / n)

    def scaled(self, factor: complex) -> "FockState":
        return FockState(self.modes, {c: a * factor for c, a in self.amplitudes.items()})

    def __add__(self, other: "FockState") -> "FockState":
        _check_same_modes(self, other)
        out = dict(self.amplitudes)
        for c, a in other.amplitudes.items():
            out[c] = out.get(c, 0) + a
        return FockState(self.modes, out)

    def __sub__(self, other: "FockState") -> "FockState":
        return self + other.scaled(-1)

    def inner(self, other: "FockState") -> complex:
        """<self|other>."""
        _check_same_modes(self, other)
        return sum(np.conj(a) * other.amplitudes.get(c, 0) for c, a in self.amplitudes.items())

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(a) <= tol for a in self.amplitudes.values())

    def to_vector(self) -> np.ndarray:
        vec = np.zeros(self.modes.dimension, dtype=complex)
        for c, a in self.amplitudes.items():
            vec[configuration_index(self.modes, c)] = a
        return vec

    @classmethod
    def from_vector(cls, modes: ModeSet, vec) -> "FockState":
        configs = list(modes.configurations())
        return cls(modes, {configs[i]: v for i, v in enumerate(np.asarray(vec)) if v != 0})


def _check_same_modes(a: FockState, b: FockState) -> None:
    if a.modes != b.modes:
        raise ValueError("states live on different mode sets")


def configuration_index(modes: ModeSet, config) -> int:
    base = modes.cap + 1
    idx = 0
    for n in config:
        idx = idx * base + n
    return idx


def _sign(config, i: int) -> int:
    return -1 if sum(config[:i]) % 2 else 1


def create(state: FockState, mode) -> FockState:
    """a^dagger on ``mode`` (index or :class:`Mode`)."""
    modes = state.modes
    i = modes.index(mode)
    out = {}
    for config, amp in state.amplitudes.items():
        n = config[i]
        if modes.fermionic:
            if n:
                continue
            factor = _sign(config, i)
        else:
            if n + 1 > modes.n_max:
                raise TruncationError(f"mode {i} would hold {n + 1} quanta, above n_max = {modes.n_max}")
            factor = math.sqrt(n + 1)
        new = config[:i] + (n + 1,) + config[i + 1 :]
        out[new] = out.get(new, 0) + factor * amp
    return FockState(modes, out)


def annihilate(state: FockState, mode) -> FockState:
    modes = state.modes
    i = modes.index(mode)
    out = {}
    for config, amp in state.amplitudes.items():
        n = config[i]
        if n == 0:
            continue
        factor = _sign(config, i) if modes.fermionic else math.sqrt(n)
        new = config[:i] + (n - 1,) + config[i + 1 :]
        out[new] = out.get(new, 0) + factor * amp
    return FockState(modes, out)


def operator_matrix(modes: ModeSet, mode, kind: str = "annihilate") -> sparse.csr_matrix:
    """Sparse matrix of a or a^dagger on the full truncated basis (lexicographic configurations).

    The bosonic a^dagger matrix simply drops the transition out of n_max.
    Fermionic matrices are built as Jordan-Wigner Kronecker products and
    have integer entries.
    """
    if kind not in ("annihilate", "create"):
        raise ValueError(f"kind must be 'annihilate' or 'create', got {kind!r}")
    i = modes.index(mode)
    m = len(modes)
    d = modes.cap + 1
    if modes.fermionic:
        lower = sparse.csr_matrix(np.array([[0, 1], [0, 0]], dtype=np.int64))
        parity = sparse.csr_matrix(np.diag([1, -1]).astype(np.int64))
    else:
        lower = sparse.diags(np.sqrt(np.arange(1, d)), 1, shape=(d, d), format="csr")
        parity = sparse.identity(d, format="csr")
    single = lower if kind == "annihilate" else lower.T.tocsr()
    ident = sparse.identity(d, dtype=single.dtype, format="csr")
    factors = [parity] * i + [single] + [ident] * (m - i - 1)
    out = sparse.csr_matrix(np.ones((1, 1), dtype=single.dtype))
    for f in factors:
        out = sparse.kron(out, f, format="csr")
    return out


def number_operator(modes: ModeSet) -> sparse.csr_matrix:
    diag = [sum(c) for c in modes.configurations()]
    return sparse.diags(np.array(diag, dtype=float), format="csr")


def hamiltonian_matrix(modes: ModeSet, hbar: float = 1.0) -> sparse.csr_matrix:
    diag = [excitation_energy(modes, c, hbar) for c in modes.configurations()]
    return sparse.diags(np.array(diag), format="csr")


# ---------------------------------------------------------------------------
# bookkeeping relative to the reference (sea) configuration


def excitation_energy(modes: ModeSet, config, hbar: float = 1.0) -> float:
    """sum hbar omega over quanta above the reference: particles in positive modes, holes in negative ones."""
    total = 0.0
    for m, n in zip(modes.modes, config):
        excited = n if m.branch == 1 else 1 - n
        total += hbar * m.omega * excited
    return total


def configuration_charge(modes: ModeSet, config, e: float = 1.0) -> float:
    """Charge relative to the reference: -e per electron, +e per positron or hole."""
    electrons, positrons = configuration_sector(modes, config)
    return e * (positrons - electrons)


def configuration_sector(modes: ModeSet, config) -> tuple[int, int]:
    """(electrons, positrons); bosons count as the first entry."""
    electrons = positrons = 0
    for m, n in zip(modes.modes, config):
        if m.species == "positron":
            positrons += n
        elif m.branch == -1:
            positrons += 1 - n
        else:
            electrons += n
    return electrons, positrons


def expectation(state: FockState, observable) -> float:
    """sum |amplitude|^2 observable(config) / norm^2."""
    norm2 = state.norm() ** 2
    return sum(abs(a) ** 2 * observable(c) for c, a in state.amplitudes.items()) / norm2


def total_charge(state: FockState, e: float = 1.0) -> float:
    return expectation(state, lambda c: configuration_charge(state.modes, c, e))


def total_energy(state: FockState, hbar: float = 1.0) -> float:
    return expectation(state, lambda c: excitation_energy(state.modes, c, hbar))


def evolve_fock(state: FockState, t: float, hbar: float = 1.0) -> FockState:
    """Each configuration picks up exp(-i E_config t / hbar)."""
    modes = state.modes
    return FockState(
        modes,
        {c: a * np.exp(-1j * excitation_energy(modes, c, hbar) * t / hbar) for c, a in state.amplitudes.items()},
    )


# ---------------------------------------------------------------------------
# sectors


def sector_probabilities(state: FockState) -> dict:
    """{(electrons, positrons): probability}; sums to 1 for a normalized state."""
    probs: dict = {}
    norm2 = state.norm() ** 2
    for c, a in state.amplitudes.items():
        key = configuration_sector(state.modes, c)
        probs[key] = probs.get(key, 0.0) + abs(a) ** 2 / norm2
    return dict(sorted(probs.items()))


def sector_wavefunction(state: FockState, n: int, m: int = 0) -> dict:
    """Amplitudes of the configurations in sector (n, m)."""
    return {c: a for c, a in state.amplitudes.items() if configuration_sector(state.modes, c) == (n, m)}


def sector_position_wavefunction(state: FockState, n: int, positions, extent: float) -> np.ndarray:
    """n-particle amplitude psi(x_1, ..., x_n) on a 1D grid for plane-wave modes exp(ikx)/sqrt(L).

    Only modes on the positive branch take part.  Fermionic sectors are sums
    of Slater determinants, bosonic ones of normalised permanents, so the
    result is antisymmetric or symmetric under exchange of any two arguments.
    """
    modes = state.modes
    x = np.asarray(positions, dtype=float)
    orbitals = np.array([np.exp(1j * m.wavevector[0] * x) / math.sqrt(extent) for m in modes.modes])
    out = np.zeros((len(x),) * n, dtype=complex)
    grids = np.meshgrid(*([np.arange(len(x))] * n), indexing="ij")
    for config, amp in sector_wavefunction(state, n, 0).items():
        occupied = [i for i, k in enumerate(config) for _ in range(k)]
        weight = amp / math.sqrt(math.factorial(n))
        if not modes.fermionic:
            weight /= math.sqrt(math.prod(math.factorial(k) for k in config))
        term = np.zeros_like(out)
        for perm in itertools.permutations(range(n)):
            sign = _permutation_sign(perm) if modes.fermionic else 1
            prod = np.ones_like(out)
            for slot, p in enumerate(perm):
                prod = prod * orbitals[occupied[p]][grids[slot]]
            term += sign * prod
        out += weight * term
    return out


def _permutation_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# Dirac sea


def dirac_sea_ground(modes: ModeSet) -> FockState:
    """Every negative-branch mode filled, every positive one empty."""
    if not modes.fermionic:
        raise ValueError("the Dirac sea needs fermionic modes")
    return FockState.basis_state(modes, modes.reference())


def make_hole(state: FockState, negative_mode) -> FockState:
    """Remove one electron from a filled negative-energy mode (a positron)."""
    i = state.modes.index(negative_mode)
    _require_filled_negative(state, i)
    return annihilate(state, i)


def excite_hole(state: FockState, negative_mode, positive_mode) -> FockState:
    """Move one electron from a filled negative mode to an empty positive mode."""
    modes = state.modes
    i = modes.index(negative_mode)
    j = modes.index(positive_mode)
    if modes.modes[j].branch != 1:
        raise ValueError(f"target mode {j} is not on the positive branch")
    _require_filled_negative(state, i)
    out = create(annihilate(state, i), j)
    if out.is_zero():
        raise ValueError(f"positive mode {j} is already occupied")
    return out


def _require_filled_negative(state: FockState, i: int) -> None:
    if state.modes.modes[i].branch != -1:
        raise ValueError(f"mode {i} is not on the negative branch")
    if any(c[i] == 0 for c in state.amplitudes):
        raise ValueError(f"negative mode {i} is already empty")


# ---------------------------------------------------------------------------
# serialization


def _occupation_string(config) -> str:
    """Digits for small occupations; otherwise dot-terminated entries, e.g. ``11.0.``."""
    if all(n < 10 for n in config):
        return "".join(str(n) for n in config)
    return "".join(f"{n}." for n in config)


def _parse_occupation(text: str) -> tuple:
    if "." in text:
        return tuple(int(x) for x in text.split(".")[:-1])
    return tuple(int(x) for x in text)


def dumps_csv(state: FockState) -> str:
    """``# modes: <json>`` header, then rows ``occupation,real,imag`` in sorted order."""
    buf = io.StringIO()
    buf.write("# modes: " + json.dumps(state.modes.to_dict(), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["occupation", "real", "imag"])
    for c in sorted(state.amplitudes):
        a = state.amplitudes[c]
        writer.writerow([_occupation_string(c), repr(a.real), repr(a.imag)])
    return buf.getvalue()


def loads_csv(text: str) -> FockState:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# modes: "):
        raise ValueError("missing '# modes:' header")
    modes = ModeSet.from_dict(json.loads(lines[0][len("# modes: "):]))
    reader = csv.reader(lines[2:])
    amps = {_parse_occupation(occ): complex(float(re), float(im)) for occ, re, im in reader}
    return FockState(modes, amps)


def save_binary(state: FockState, path) -> None:
    """Compact .npz: occupation matrix (uint8), complex amplitudes and the mode-set header."""
    configs = sorted(state.amplitudes)
    occ = np.array(configs, dtype=np.uint8).reshape(len(configs), len(state.modes))
    amps = np.array([state.amplitudes[c] for c in configs], dtype=complex)
    header = json.dumps(state.modes.to_dict(), sort_keys=True)
    with open(path, "wb") as fh:
        np.savez(fh, occupations=occ, amplitudes=amps, header=np.array(header))


def load_binary(path) -> FockState:
    with np.load(Path(path)) as data:
        modes = ModeSet.from_dict(json.loads(str(data["header"])))
        return FockState(modes, {tuple(int(x) for x in row): a for row, a in zip(data["occupations"], data["amplitudes"])})
