"""Periodic lattice, discrete Fourier modes and dispersion relations.

Every field in the package lives on a :class:`ModeBasis`: a cubic periodic box
of side ``extent`` sampled at ``points_per_axis`` sites per axis.  Arrays are
stored with the spatial axes *last*, e.g. a spinor field has shape
``(4, N, N, N)`` and a vector field ``(3, N, N, N)``.

Mode amplitudes use the continuum-normalised unitary convention

    f(x) = sum_k f_k exp(i k.x) / sqrt(V),    f_k = integral f(x) exp(-i k.x) dx / sqrt(V)

which is numpy's ``norm="ortho"`` FFT times ``sqrt(spacing**dim)``.  With it the
mode sum of ``|f_k|**2`` equals the lattice integral of ``|f(x)|**2``, so field
norms and energies are the same number in both representations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class PhysicalConstants:
    """hbar, c, electron mass m and elementary charge e (positive)."""

    hbar: float = 1.0
    c: float = 1.0
    m: float = 1.0
    e: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "c", "m", "e"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"physical constant {name} must be positive, got {value!r}")

    @property
    def compton_length(self) -> float:
        return self.hbar / (self.m * self.c)

    def with_mass(self, m: float) -> "PhysicalConstants":
        return PhysicalConstants(hbar=self.hbar, c=self.c, m=m, e=self.e)


@dataclass(frozen=True)
class ModeBasis:
    dim: int
    extent: float
    points_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 3):
            raise ValueError(f"dim must be 1 or 3, got {self.dim}")
        n = self.points_per_axis
        if int(n) != n or n < 4 or n % 2:
            raise ValueError(f"points_per_axis must be an even integer >= 4, got {n}")
        if not self.extent > 0:
            raise ValueError(f"extent must be positive, got {self.extent}")

    # -- geometry ---------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def spacing(self) -> float:
        return self.extent / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.extent**self.dim

    @cached_property
    def axis_coords(self) -> np.ndarray:
        return np.arange(self.points_per_axis) * self.spacing

    @cached_property
    def positions(self) -> np.ndarray:
        """Site coordinates, shape ``(dim, *shape)``, origin at site 0."""
        grids = np.meshgrid(*([self.axis_coords] * self.dim), indexing="ij")
        return np.stack(grids)

    # -- modes --------------------------------------------------------------

    @cached_property
    def axis_wavenumbers(self) -> np.ndarray:
        """Wavenumbers along one axis in FFT storage order."""
        n = self.points_per_axis
        return 2 * np.pi * np.fft.fftfreq(n, d=self.spacing)

    @cached_property
    def kgrid(self) -> np.ndarray:
        """Wavevector components in FFT storage order, shape ``(dim, *shape)``."""
        grids = np.meshgrid(*([self.axis_wavenumbers] * self.dim), indexing="ij")
        return np.stack(grids)

    @cached_property
    def kgrid3(self) -> np.ndarray:
        """Wavevectors padded to three components, shape ``(3, *shape)``; absent axes are zero."""
        k3 = np.zeros((3,) + self.shape)
        k3[: self.dim] = self.kgrid
        return k3

    @cached_property
    def kmag(self) -> np.ndarray:
        return np.sqrt(np.sum(self.kgrid**2, axis=0))

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True on modes with any component at the self-aliased index N/2."""
        n = self.points_per_axis
        top = np.zeros(n, dtype=bool)
        top[n // 2] = True
        masks = np.meshgrid(*([top] * self.dim), indexing="ij")
        return np.logical_or.reduce(masks)

    def mode_integers(self) -> np.ndarray:
        """Signed integer labels n in canonical row-major order, shape ``(N**dim, dim)``."""
        n = self.points_per_axis
        axis = np.arange(-n // 2, n // 2)
        grids = np.meshgrid(*([axis] * self.dim), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def wavevectors(self) -> np.ndarray:
        """Wavevectors k = 2 pi n / L in canonical (row-major, signed) order."""
        return 2 * np.pi * self.mode_integers() / self.extent

    def negation_index(self) -> np.ndarray:
        """Permutation mapping each canonical mode to the mode of -k.

        The Nyquist index -N/2 is its own negative (k and -k differ by a
        reciprocal lattice vector), which keeps the map a bijection.
        """
        n = self.points_per_axis
        ints = self.mode_integers()
        neg = (-ints + n // 2) % n - n // 2
        strides = n ** np.arange(self.dim - 1, -1, -1)
        return ((neg + n // 2) * strides).sum(axis=-1)

    # -- transforms ---------------------------------------------------------

    @property
    def _axes(self) -> tuple[int, ...]:
        return tuple(range(-self.dim, 0))

    def to_modes(self, values: np.ndarray) -> np.ndarray:
        """Position samples -> mode amplitudes over the trailing ``dim`` axes."""
        self._check_trailing(values)
        return np.fft.fftn(values, axes=self._axes, norm="ortho") * np.sqrt(self.cell_volume)

    def to_position(self, modes: np.ndarray) -> np.ndarray:
        self._check_trailing(modes)
        return np.fft.ifftn(modes, axes=self._axes, norm="ortho") / np.sqrt(self.cell_volume)

    def integrate(self, density: np.ndarray) -> np.ndarray:
        """Lattice integral over the trailing spatial axes."""
        self._check_trailing(density)
        return np.sum(density, axis=self._axes) * self.cell_volume

    def gradient_modes(self, modes: np.ndarray) -> np.ndarray:
        """i k f_k, with a new leading axis of length ``dim``."""
        return 1j * self.kgrid.reshape((self.dim,) + (1,) * (modes.ndim - self.dim) + self.shape) * modes

    def gradient(self, values: np.ndarray) -> np.ndarray:
        """Spectral gradient of position samples; new leading axis of length ``dim``."""
        return self.to_position(self.gradient_modes(self.to_modes(values)))

    def centered_offsets(self, center) -> np.ndarray:
        """Minimum-image displacement of every site from ``center``, shape ``(dim, *shape)``."""
        center = np.asarray(center, dtype=float).reshape((self.dim,) + (1,) * self.dim)
        d = self.positions - center
        return d - self.extent * np.round(d / self.extent)

    def _check_trailing(self, values: np.ndarray) -> None:
        if values.shape[values.ndim - self.dim:] != self.shape:
            raise ValueError(f"array shape {values.shape} does not end with lattice shape {self.shape}")


def build_basis(dim: int, extent: float, points_per_axis: int) -> ModeBasis:
    return ModeBasis(dim=int(dim), extent=float(extent), points_per_axis=int(points_per_axis))


def _norm_last(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if k.ndim == 0:
        return np.abs(k)
    return np.sqrt(np.sum(k**2, axis=-1))


def omega_massive(kmag, constants: PhysicalConstants) -> np.ndarray:
    """sqrt(m^2 c^4 + hbar^2 k^2 c^2) / hbar for wavenumber magnitudes."""
    c, hbar, m = constants.c, constants.hbar, constants.m
    kmag = np.asarray(kmag, dtype=float)
    return np.sqrt((m * c**2) ** 2 + (hbar * kmag * c) ** 2) / hbar


def dispersion_massive(k, constants: PhysicalConstants) -> np.ndarray:
    """Angular frequency of a massive mode; ``k`` is a scalar magnitude or vector(s) on the last axis."""
    return omega_massive(_norm_last(k), constants)


def dispersion_photon(k, constants: PhysicalConstants | None = None) -> np.ndarray:
    c = 1.0 if constants is None else constants.c
    return c * _norm_last(k)


def load_basis_config(path) -> tuple[ModeBasis, PhysicalConstants]:
    """Read ``dim``, ``extent``, ``points_per_axis`` and optional ``constants`` from JSON or YAML."""
    path = Path(path)
    text = path.read_text()
    if path.suffix in (".yaml", ".yml"):
        import yaml

        data = yaml.safe_load(text)
    else:
        data = json.loads(text)
    allowed = {"dim", "extent", "points_per_axis", "constants"}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown basis config keys: {sorted(unknown)}")
    constants = PhysicalConstants(**data.get("constants", {}))
    return build_basis(data["dim"], data["extent"], data["points_per_axis"]), constants
