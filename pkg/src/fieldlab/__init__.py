"""fieldlab: particle (Fock) and field (wave functional) pictures of free quantum fields, side by side,
with the classical Dirac and electromagnetic observables that go with them."""

__version__ = "0.1.0"

from .modebasis import ModeBasis, PhysicalConstants, build_basis, dispersion_massive, dispersion_photon  # noqa: E402

__all__ = [
    "ModeBasis",
    "PhysicalConstants",
    "build_basis",
    "dispersion_massive",
    "dispersion_photon",
    "__version__",
]
