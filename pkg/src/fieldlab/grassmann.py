"""Finite Grassmann algebras and a toy fermion field with Grassmann values.

Elements store complex coefficients keyed by bitmasks over the generators;
bit g set means theta_g appears, and a monomial always means the product in
increasing generator order.  Multiplying two monomials a and b gives zero if
they share a generator and otherwise the sign (-1)^(number of pairs g in a,
h in b with g > h) from sorting.

Generators come in conjugate pairs: theta_{2i} and theta_{2i+1} = theta_{2i}^dagger.
Conjugation reverses products, (x y)^dagger = y^dagger x^dagger, and
conjugates coefficients.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

MAX_GENERATORS = 24


def popcount(x: int) -> int:
    return bin(x).count("1")


def monomial_sign(a: int, b: int) -> int:
    """Sign of theta_a theta_b rewritten in canonical order (0 if they overlap)."""
    if a & b:
        return 0
    swaps = 0
    rest = b
    while rest:
        low = rest & -rest
        j = low.bit_length() - 1
        swaps += popcount(a >> (j + 1))
        rest ^= low
    return -1 if swaps % 2 else 1


def _bits(mask: int) -> list[int]:
    return [g for g in range(mask.bit_length()) if mask >> g & 1]


@dataclass(frozen=True)
class GrassmannAlgebra:
    generators: int
    self_conjugate: bool = False

    def __post_init__(self):
        if not 0 < self.generators <= MAX_GENERATORS:
            raise ValueError(f"generator count must be in 1..{MAX_GENERATORS}, got {self.generators}")
        if not self.self_conjugate and self.generators % 2:
            raise ValueError("conjugate pairs need an even generator count")

    def conjugate_index(self, g: int) -> int:
        return g if self.self_conjugate else g ^ 1

    def generator(self, g: int, coefficient: complex = 1.0) -> "GrassmannElement":
        if not 0 <= g < self.generators:
            raise IndexError(f"generator {g} out of range")
        return GrassmannElement(self, {1 << g: coefficient})

    def scalar(self, value: complex) -> "GrassmannElement":
        return GrassmannElement(self, {0: value})

    def zero(self) -> "GrassmannElement":
        return GrassmannElement(self, {})

    def monomial(self, indices) -> "GrassmannElement":
        """Ordered product theta_{i1} theta_{i2} ... in the given order."""
        out = self.scalar(1.0)
        for g in indices:
            out = out * self.generator(g)
        return out

    def random_element(self, rng: np.random.Generator, terms: int = 8) -> "GrassmannElement":
        masks = rng.integers(0, 1 << self.generators, size=terms)
        values = rng.standard_normal(terms) + 1j * rng.standard_normal(terms)
        return GrassmannElement(self, {int(m): complex(v) for m, v in zip(masks, values)})


@dataclass(frozen=True, eq=False)
class GrassmannElement:
    algebra: GrassmannAlgebra
    coefficients: dict = field(default_factory=dict)

    def __post_init__(self):
        clean: dict = {}
        full = 1 << self.algebra.generators
        for mask, value in self.coefficients.items():
            mask = int(mask)
            if not 0 <= mask < full:
                raise ValueError(f"mask {mask:b} uses generators outside the algebra")
            clean[mask] = clean.get(mask, 0) + complex(value)
        object.__setattr__(self, "coefficients", {m: v for m, v in clean.items() if v != 0})

    def _check(self, other: "GrassmannElement") -> None:
        if self.algebra != other.algebra:
            raise ValueError("elements belong to different Grassmann algebras")

    def _coerce(self, other) -> "GrassmannElement":
        if isinstance(other, GrassmannElement):
            self._check(other)
            return other
        return self.algebra.scalar(other)

    def __add__(self, other) -> "GrassmannElement":
        other = self._coerce(other)
        out = dict(self.coefficients)
        for m, v in other.coefficients.items():
            out[m] = out.get(m, 0) + v
        return GrassmannElement(self.algebra, out)

    __radd__ = __add__

    def __neg__(self) -> "GrassmannElement":
        return GrassmannElement(self.algebra, {m: -v for m, v in self.coefficients.items()})

    def __sub__(self, other) -> "GrassmannElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "GrassmannElement":
        return self._coerce(other) - self

    def __mul__(self, other) -> "GrassmannElement":
        if not isinstance(other, GrassmannElement):
            return GrassmannElement(self.algebra, {m: v * other for m, v in self.coefficients.items()})
        return multiply(self, other)

    def __rmul__(self, other) -> "GrassmannElement":
        return GrassmannElement(self.algebra, {m: other * v for m, v in self.coefficients.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrassmannElement):
            other = self.algebra.scalar(other)
        return self.algebra == other.algebra and self.coefficients == other.coefficients

    __hash__ = None

    @property
    def body(self) -> complex:
        return self.coefficients.get(0, 0j)

    @property
    def soul(self) -> "GrassmannElement":
        return GrassmannElement(self.algebra, {m: v for m, v in self.coefficients.items() if m})

    def is_zero(self) -> bool:
        return not self.coefficients

    def grades(self) -> set:
        return {popcount(m) for m in self.coefficients}

    def conjugate(self) -> "GrassmannElement":
        return conjugate(self)

    def dump(self) -> str:
        """One line per monomial, ``θ_{i1}θ_{i2}: a+bi``, in mask order."""
        lines = []
        for mask in sorted(self.coefficients):
            v = self.coefficients[mask]
            name = "".join(f"θ_{{{g}}}" for g in _bits(mask)) or "1"
            lines.append(f"{name}: {v.real!r}{v.imag:+}i")
        return "\n".join(lines)


def multiply(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    a._check(b)
    out: dict = {}
    for ma, va in a.coefficients.items():
        for mb, vb in b.coefficients.items():
            s = monomial_sign(ma, mb)
            if s:
                m = ma | mb
                out[m] = out.get(m, 0) + s * va * vb
    return GrassmannElement(a.algebra, out)


def conjugate(a: GrassmannElement) -> GrassmannElement:
    """(c theta_{i1} ... theta_{ik})^dagger = c* theta_{ik}^dagger ... theta_{i1}^dagger."""
    alg = a.algebra
    out = alg.zero()
    for mask, v in a.coefficients.items():
        reversed_conj = [alg.conjugate_index(g) for g in reversed(_bits(mask))]
        out = out + alg.monomial(reversed_conj) * np.conj(v)
    return out


def anticommutator(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    return a * b + b * a


# ---------------------------------------------------------------------------
# toy fermion field


@dataclass(frozen=True)
class ToyFermionField:
    """psi_i = c_i theta_i for M modes, with theta_i = generator 2i and theta_i^dagger = generator 2i+1.

    The complex configuration (c_1, ..., c_M) and the Grassmann field are in
    one-to-one correspondence through these coefficients.
    """

    modes: int
    values: tuple = ()

    def __post_init__(self):
        if not 0 < self.modes <= MAX_GENERATORS // 2:
            raise ValueError(f"toy fields support 1..{MAX_GENERATORS // 2} modes")
        values = tuple(complex(v) for v in self.values) if self.values else (1.0 + 0j,) * self.modes
        if len(values) != self.modes:
            raise ValueError("one complex value per mode is required")
        object.__setattr__(self, "values", values)

    @property
    def algebra(self) -> GrassmannAlgebra:
        return GrassmannAlgebra(2 * self.modes)

    def theta(self, i: int) -> GrassmannElement:
        return self.algebra.generator(2 * i)

    def theta_bar(self, i: int) -> GrassmannElement:
        return self.algebra.generator(2 * i + 1)

    def value(self, i: int) -> GrassmannElement:
        """Grassmann field value psi_i."""
        return self.theta(i) * self.values[i]

    def complex_configuration(self) -> np.ndarray:
        return np.array(self.values)

    @classmethod
    def from_configuration(cls, config) -> "ToyFermionField":
        config = tuple(complex(c) for c in config)
        return cls(len(config), config)

    def density(self) -> GrassmannElement:
        """psi^dagger psi = sum_i psi_i^dagger psi_i."""
        out = self.algebra.zero()
        for i in range(self.modes):
            v = self.value(i)
            out = out + v.conjugate() * v
        return out

    def random_functional(self, rng: np.random.Generator) -> GrassmannElement:
        """Normalized holomorphic toy functional sum_S a_S theta_S."""
        amps = rng.standard_normal(2**self.modes) + 1j * rng.standard_normal(2**self.modes)
        amps /= np.linalg.norm(amps)
        out = self.algebra.zero()
        for idx, subset in enumerate(self.configuration_family()):
            out = out + configuration_eigenstate(self, subset) * amps[idx]
        return out

    def configuration_family(self) -> list[tuple]:
        """Discrete complex configurations c in {0, 1}^M."""
        return list(itertools.product((0, 1), repeat=self.modes))


def field_operator_action(field: ToyFermionField, i: int, psi: GrassmannElement) -> GrassmannElement:
    """Multiply the functional by the field value: (psi_i-hat Psi) = psi_i Psi."""
    return field.value(i) * psi


def field_anticommutator(field: ToyFermionField, i: int, j: int, psi: GrassmannElement) -> GrassmannElement:
    return field_operator_action(field, i, field_operator_action(field, j, psi)) + field_operator_action(
        field, j, field_operator_action(field, i, psi)
    )


def complex_anticommutator(values, i: int, j: int, psi: complex = 1.0) -> complex:
    """The same construction with commuting complex field values: 2 psi_i psi_j Psi."""
    values = np.asarray(values, dtype=complex)
    return values[i] * values[j] * psi + values[j] * values[i] * psi


@dataclass(frozen=True)
class PathologyReport:
    density_body: complex
    density_soul_terms: int
    density_soul_max: float
    amplitude_body: complex
    amplitude_soul_terms: int
    amplitude_soul_max: float

    @property
    def density_pathological(self) -> bool:
        return self.density_soul_terms > 0

    @property
    def amplitude_pathological(self) -> bool:
        return self.amplitude_soul_terms > 0

    def to_dict(self) -> dict:
        return {
            "density_body": [self.density_body.real, self.density_body.imag],
            "density_soul_terms": self.density_soul_terms,
            "density_soul_max": self.density_soul_max,
            "density_pathological": self.density_pathological,
            "amplitude_body": [self.amplitude_body.real, self.amplitude_body.imag],
            "amplitude_soul_terms": self.amplitude_soul_terms,
            "amplitude_soul_max": self.amplitude_soul_max,
            "amplitude_pathological": self.amplitude_pathological,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _soul_stats(x: GrassmannElement) -> tuple[int, float]:
    soul = x.soul.coefficients
    return len(soul), max((abs(v) for v in soul.values()), default=0.0)


def density_pathology_report(field: ToyFermionField, psi: GrassmannElement | None = None) -> PathologyReport:
    """Body and soul of psi^dagger psi and of Psi^dagger Psi for a Grassmann-amplitude functional.

    Without an explicit ``psi`` the functional 1 + psi_1 (psi_1 the first
    field value) is used, a Grassmann-valued amplitude.
    """
    density = field.density()
    if psi is None:
        psi = field.algebra.scalar(1.0) + field.value(0)
    amp2 = psi.conjugate() * psi
    d_terms, d_max = _soul_stats(density)
    a_terms, a_max = _soul_stats(amp2)
    return PathologyReport(density.body, d_terms, d_max, amp2.body, a_terms, a_max)


# ---------------------------------------------------------------------------
# Berezin integration and paired probabilities


def berezin_integral(x: GrassmannElement, modes: int) -> complex:
    """Coefficient of theta_0^dagger theta_0 theta_1^dagger theta_1 ... (integrate out every pair)."""
    alg = x.algebra
    if alg.generators != 2 * modes or alg.self_conjugate:
        raise ValueError("Berezin integration here needs the paired toy algebra")
    full = (1 << alg.generators) - 1
    # each theta^dagger theta = -theta theta^dagger relative to canonical order
    sign = -1 if modes % 2 else 1
    return sign * x.coefficients.get(full, 0j)


def measure_weight(field: ToyFermionField) -> GrassmannElement:
    """prod_i (1 + theta_i^dagger theta_i) = exp(sum theta_i^dagger theta_i)."""
    out = field.algebra.scalar(1.0)
    for i in range(field.modes):
        out = out * (field.algebra.scalar(1.0) + field.theta_bar(i) * field.theta(i))
    return out


def functional_inner_product(field: ToyFermionField, phi: GrassmannElement, psi: GrassmannElement) -> complex:
    """<Phi|Psi> = Berezin integral of Phi^dagger prod(1 + theta^dagger theta) Psi."""
    return berezin_integral(phi.conjugate() * measure_weight(field) * psi, field.modes)


def configuration_eigenstate(field: ToyFermionField, config) -> GrassmannElement:
    """theta_S for the modes with c_i = 1, in increasing mode order."""
    config = tuple(int(c) for c in config)
    if len(config) != field.modes or any(c not in (0, 1) for c in config):
        raise ValueError(f"configuration must be a 0/1 tuple of length {field.modes}")
    return field.algebra.monomial([2 * i for i, c in enumerate(config) if c])


def paired_probability(field: ToyFermionField, psi: GrassmannElement, config) -> float:
    """|<psi^c|Psi>|^2 for the configuration eigenstate of ``config``."""
    amp = functional_inner_product(field, configuration_eigenstate(field, config), psi)
    return float(abs(amp) ** 2)


def paired_distribution(field: ToyFermionField, psi: GrassmannElement) -> dict:
    return {c: paired_probability(field, psi, c) for c in field.configuration_family()}
