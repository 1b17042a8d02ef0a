"""Fuchsian first-order systems on the Riemann sphere.

A system is dY/dz = A(z) Y with A(z) = sum_i B_i / (z - a_i), poles a_i
distinct and residue matrices B_i summing to zero so that infinity is a
regular point.  This module owns validation, the local Levelt exponent data
at each pole, integer-resonance detection, and the map from residues to the
exponential generators exp(2 pi i B_j).
"""

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import jsonio
from .errors import ValidationError
from .linalg import as_square_matrix, eigen_decompose, matrix_exp

DEFAULT_RESIDUE_SUM_TOL = 1e-12
DEFAULT_RESONANCE_TOL = 1e-8
DEFAULT_POLE_SEPARATION = 1e-9

TWO_PI_I = 2j * math.pi


class ResonanceWarning(UserWarning):
    """Emitted when generators are requested for a resonant system."""


@dataclass(frozen=True)
class FuchsianSystem:
    """Validated Fuchsian system: distinct poles, residues summing to zero.

    Instances are immutable; the residue arrays are write-protected views.
    Build one with ``validate_system`` or ``FuchsianSystem.from_dict``.
    """

    poles: tuple[complex, ...]
    residues: tuple[np.ndarray, ...]
    dimension: int
    residue_sum_defect: float

    @property
    def pole_count(self) -> int:
        return len(self.poles)

    def coefficient(self, z: complex) -> np.ndarray:
        """Coefficient matrix A(z); raises at a pole."""
        for a in self.poles:
            if z == a:
                raise ValidationError(f"A(z) evaluated at the pole {a}")
        out = np.zeros((self.dimension, self.dimension), dtype=complex)
        for a, b in zip(self.poles, self.residues):
            out += b / (z - a)
        return out

    def to_dict(self) -> dict:
        return {
            "schema": jsonio.SYSTEM_SCHEMA,
            "dimension": self.dimension,
            "poles": [jsonio.complex_to_pair(a) for a in self.poles],
            "residues": [jsonio.matrix_to_pairs(b) for b in self.residues],
        }

    @staticmethod
    def from_dict(data: dict, sum_tol: float = DEFAULT_RESIDUE_SUM_TOL) -> "FuchsianSystem":
        for key in ("dimension", "poles", "residues"):
            if key not in data:
                raise ValidationError(f"system JSON is missing the '{key}' field")
        poles = [jsonio.pair_to_complex(p) for p in data["poles"]]
        residues = [jsonio.pairs_to_matrix(r) for r in data["residues"]]
        system = validate_system(poles, residues, sum_tol=sum_tol)
        if int(data["dimension"]) != system.dimension:
            raise ValidationError(
                f"declared dimension {data['dimension']} does not match "
                f"residue shape {system.dimension}"
            )
        return system


def validate_system(
    poles,
    residues,
    sum_tol: float = DEFAULT_RESIDUE_SUM_TOL,
    separation_tol: float = DEFAULT_POLE_SEPARATION,
) -> FuchsianSystem:
    """Validate raw pole and residue data and build a ``FuchsianSystem``.

    Rejects systems with fewer than two poles, duplicate (or nearly
    coincident) poles, non-square or mismatched residues, non-finite
    entries, and residue sums with norm above ``sum_tol``.
    """
    pole_list = [complex(a) for a in poles]
    if len(pole_list) < 2:
        raise ValidationError("a Fuchsian system needs at least two poles")
    if len(residues) != len(pole_list):
        raise ValidationError(
            f"{len(pole_list)} poles but {len(residues)} residue matrices"
        )
    for a in pole_list:
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise ValidationError("poles must be finite complex numbers")
    for i in range(len(pole_list)):
        for j in range(i + 1, len(pole_list)):
            if abs(pole_list[i] - pole_list[j]) <= separation_tol:
                raise ValidationError(
                    f"poles {i} and {j} coincide: {pole_list[i]} vs {pole_list[j]}"
                )
    mats = [as_square_matrix(b, f"residue {i}") for i, b in enumerate(residues)]
    dim = mats[0].shape[0]
    for i, b in enumerate(mats):
        if b.shape[0] != dim:
            raise ValidationError(
                f"residue {i} has dimension {b.shape[0]}, expected {dim}"
            )
    defect = float(np.linalg.norm(sum(mats), 2))
    if defect > sum_tol:
        raise ValidationError(
            f"residues sum to a matrix of norm {defect:.3e} (limit {sum_tol:g}); "
            "infinity would be an irregular point"
        )
    for b in mats:
        b.flags.writeable = False
    return FuchsianSystem(
        poles=tuple(pole_list),
        residues=tuple(mats),
        dimension=dim,
        residue_sum_defect=defect,
    )


@dataclass(frozen=True)
class LeveltExponent:
    """One local exponent lambda = integer_part + fractional_part.

    The split is exact: ``integer_part`` is floor(Re lambda), so the
    fractional part phi satisfies 0 <= Re phi < 1 and
    integer_part + fractional_part reproduces the eigenvalue bit for bit.
    """

    eigenvalue: complex
    integer_part: int
    fractional_part: complex
    multiplicity: int


@dataclass(frozen=True)
class LeveltData:
    """Levelt exponent tables, one tuple of exponents per pole."""

    per_pole: tuple[tuple[LeveltExponent, ...], ...]


def levelt_data(system: FuchsianSystem, tol: float = 1e-10) -> LeveltData:
    """Levelt local data at every pole of ``system``.

    Eigenvalues of each residue are clustered at absolute distance ``tol``
    and each is split as lambda = rho + phi with rho = floor(Re lambda).
    Exponents are ordered by (Re phi, Im phi, rho).
    """
    tables = []
    for b in system.residues:
        entries = []
        for lam, mult in eigen_decompose(b, tol):
            rho = math.floor(lam.real)
            phi = lam - rho
            entries.append(
                LeveltExponent(
                    eigenvalue=lam,
                    integer_part=rho,
                    fractional_part=phi,
                    multiplicity=mult,
                )
            )
        entries.sort(
            key=lambda e: (e.fractional_part.real, e.fractional_part.imag, e.integer_part)
        )
        tables.append(tuple(entries))
    return LeveltData(per_pole=tuple(tables))


@dataclass(frozen=True)
class PoleResonance:
    """Resonance verdict for one pole, with witnessing eigenvalue pairs."""

    pole_index: int
    resonant: bool
    witnesses: tuple[tuple[complex, complex, int], ...]


def is_non_resonant(system: FuchsianSystem, tol: float = DEFAULT_RESONANCE_TOL):
    """Per-pole resonance report.

    A pole is resonant when two eigenvalues of its residue differ by a
    nonzero integer within ``tol``.  Returns a list of ``PoleResonance``
    records; the system is non-resonant when none of them is resonant.
    """
    report = []
    for j, b in enumerate(system.residues):
        eigs = eigen_decompose(b, tol)
        witnesses = []
        for i in range(len(eigs)):
            for k in range(len(eigs)):
                if i == k:
                    continue
                diff = eigs[i][0] - eigs[k][0]
                nearest = round(diff.real)
                if nearest == 0:
                    continue
                if abs(diff - nearest) <= tol:
                    witnesses.append((eigs[i][0], eigs[k][0], int(nearest)))
        report.append(
            PoleResonance(
                pole_index=j,
                resonant=bool(witnesses),
                witnesses=tuple(witnesses),
            )
        )
    return report


def system_is_non_resonant(system: FuchsianSystem, tol: float = DEFAULT_RESONANCE_TOL) -> bool:
    return not any(entry.resonant for entry in is_non_resonant(system, tol))


def galois_generators(system: FuchsianSystem, resonance_tol: float = DEFAULT_RESONANCE_TOL):
    """Generators exp(2 pi i B_j), one per pole.

    For a non-resonant system these generate the differential Galois group
    (as an algebraic group, together with closure).  A resonant system still
    yields the matrices but triggers a ``ResonanceWarning``, since the
    generation statement is only guaranteed under non-resonance.
    """
    report = is_non_resonant(system, resonance_tol)
    bad = [entry.pole_index for entry in report if entry.resonant]
    if bad:
        warnings.warn(
            f"system is resonant at pole index(es) {bad}; the exponential "
            "generators may not generate the differential Galois group",
            ResonanceWarning,
            stacklevel=2,
        )
    return [matrix_exp(TWO_PI_I * b) for b in system.residues]


def pole_angle(a: complex, base: complex) -> float:
    """Angle of a - base in (-pi, pi], used for loop ordering conventions."""
    return cmath.phase(a - base)
