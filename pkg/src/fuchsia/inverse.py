"""Desk-scale inverse monodromy: residues from target matrices.

Given poles and target monodromy matrices near the identity, seed each
residue with the first series term (M_j - I) / (2 pi i), enforce the zero
residue sum on the last one, and refine by damped Gauss-Newton on the map
residues -> monodromy.  The Jacobian uses central finite differences with a
looser integration tolerance than the residual itself; steps come from a
least-squares solve and are halved until the residual decreases.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .monodromy import continue_solution
from .paths import build_loops, composition_order, default_base_point
from .system import FuchsianSystem, PoleResonance, is_non_resonant, validate_system
from . import jsonio

DEFAULT_RESIDUAL_TOL = 1e-8
DEFAULT_PRODUCT_TOL = 1e-6
DEFAULT_PROXIMITY_BOUND = 0.5
DEFAULT_MAX_ITER = 50
DEFAULT_FORWARD_TOL = 1e-9
DEFAULT_JACOBIAN_TOL = 1e-8

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class InverseProblemInstance:
    """Validated inverse-problem data: poles, targets, base point."""

    poles: tuple[complex, ...]
    targets: tuple[np.ndarray, ...]
    base_point: complex
    dimension: int

    def to_dict(self) -> dict:
        return {
            "schema": jsonio.INVERSE_SCHEMA,
            "poles": [jsonio.complex_to_pair(a) for a in self.poles],
            "targets": [jsonio.matrix_to_pairs(m) for m in self.targets],
            "base_point": jsonio.complex_to_pair(self.base_point),
        }

    @staticmethod
    def from_dict(data: dict, **kwargs) -> "InverseProblemInstance":
        for key in ("poles", "targets"):
            if key not in data:
                raise ValidationError(f"inverse instance JSON is missing '{key}'")
        poles = [jsonio.pair_to_complex(p) for p in data["poles"]]
        targets = [jsonio.pairs_to_matrix(m) for m in data["targets"]]
        base = None
        if "base_point" in data:
            base = jsonio.pair_to_complex(data["base_point"])
        return validate_instance(poles, targets, base_point=base, **kwargs)


def validate_instance(
    poles,
    targets,
    base_point=None,
    product_tol: float = DEFAULT_PRODUCT_TOL,
    proximity_bound: float = DEFAULT_PROXIMITY_BOUND,
    allow_far: bool = False,
) -> InverseProblemInstance:
    """Check an inverse-problem instance for solvability by this method.

    Demands at least two distinct poles, one invertible target per pole,
    targets multiplying to the identity (in the composition order of the
    loop convention) within ``product_tol``, and, unless ``allow_far``,
    every target within ``proximity_bound`` of the identity in Frobenius
    norm, which is the regime where the first-order seed is trustworthy.
    """
    pole_list = [complex(a) for a in poles]
    if len(pole_list) < 2:
        raise ValidationError("an inverse instance needs at least two poles")
    for i in range(len(pole_list)):
        for j in range(i + 1, len(pole_list)):
            if abs(pole_list[i] - pole_list[j]) <= 1e-9:
                raise ValidationError(f"poles {i} and {j} coincide")
    if len(targets) != len(pole_list):
        raise ValidationError(
            f"{len(pole_list)} poles but {len(targets)} target matrices"
        )
    mats = []
    dim = None
    for j, m in enumerate(targets):
        arr = np.array(m, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"target {j} is not square")
        if dim is None:
            dim = arr.shape[0]
        elif arr.shape[0] != dim:
            raise ValidationError(f"target {j} has dimension {arr.shape[0]}, expected {dim}")
        if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
            raise ValidationError(f"target {j} has non-finite entries")
        sv = np.linalg.svd(arr, compute_uv=False)
        if sv[-1] <= 1e-12 * max(1.0, sv[0]):
            raise ValidationError(f"target {j} is numerically singular")
        arr.flags.writeable = False
        mats.append(arr)
    z0 = default_base_point(pole_list) if base_point is None else complex(base_point)
    order = composition_order(pole_list, z0)
    product = np.eye(dim, dtype=complex)
    for index in order:
        product = mats[index] @ product
    defect = float(np.linalg.norm(product - np.eye(dim)))
    if defect > product_tol:
        raise ValidationError(
            f"targets do not compose to the identity: defect {defect:.3e} "
            f"(limit {product_tol:g}) in traversal order {order}"
        )
    if not allow_far:
        worst = max(float(np.linalg.norm(m - np.eye(dim))) for m in mats)
        if worst > proximity_bound:
            raise ValidationError(
                f"a target is {worst:.3e} from the identity (limit "
                f"{proximity_bound:g}); pass allow_far to attempt it anyway"
            )
    return InverseProblemInstance(
        poles=tuple(pole_list),
        targets=tuple(mats),
        base_point=z0,
        dimension=dim,
    )


def first_order_seed(instance: InverseProblemInstance) -> tuple[np.ndarray, ...]:
    """First series term (M_j - I) / (2 pi i) with the last residue adjusted.

    The error of this seed is quadratic in the distance of the targets from
    the identity.  The final residue is minus the sum of the others so the
    seed is always an admissible Fuchsian system.
    """
    eye = np.eye(instance.dimension, dtype=complex)
    seeds = [(m - eye) / TWO_PI_I for m in instance.targets[:-1]]
    seeds.append(-sum(seeds))
    return tuple(seeds)


@dataclass(frozen=True)
class InverseSolution:
    """Result of the Gauss-Newton refinement."""

    residues: tuple[np.ndarray, ...]
    final_residual: float
    iterations: int
    converged: bool
    non_resonant: bool
    resonance: tuple[PoleResonance, ...]


def _pack(residues, dim: int) -> np.ndarray:
    parts = []
    for a in residues[:-1]:
        flat = np.asarray(a, dtype=complex).reshape(-1)
        parts.append(flat.real)
        parts.append(flat.imag)
    return np.concatenate(parts)


def _unpack(x: np.ndarray, count: int, dim: int) -> list[np.ndarray]:
    block = dim * dim
    residues = []
    for j in range(count - 1):
        re = x[2 * j * block : (2 * j + 1) * block]
        im = x[(2 * j + 1) * block : (2 * j + 2) * block]
        residues.append((re + 1j * im).reshape(dim, dim))
    residues.append(-sum(residues))
    return residues


def _forward(instance: InverseProblemInstance, loops, residues, tol: float):
    system = validate_system(instance.poles, residues)
    out = []
    for loop in loops:
        m, _ = continue_solution(system, loop, tol)
        out.append(m)
    return out


def _residual_vector(computed, targets) -> np.ndarray:
    parts = []
    for m, t in zip(computed, targets):
        diff = (m - t).reshape(-1)
        parts.append(diff.real)
        parts.append(diff.imag)
    return np.concatenate(parts)


def _residual_metric(computed, targets) -> float:
    return max(float(np.linalg.norm(m - t)) for m, t in zip(computed, targets))


def solve(
    instance: InverseProblemInstance,
    tol: float = DEFAULT_RESIDUAL_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    integration_tol: float = DEFAULT_FORWARD_TOL,
    jacobian_tol: float = DEFAULT_JACOBIAN_TOL,
    step_scale: float = 1e-5,
) -> InverseSolution:
    """Recover residues whose monodromy matches the instance targets.

    Starts from the first-order seed and iterates damped Gauss-Newton on
    the stacked real residual until ``max_j |M_hat_j - M_j|_F <= tol`` or
    ``max_iter`` iterations pass.  Returns the best iterate either way with
    ``converged`` reporting which case occurred; the resonance status of
    the returned system is evaluated and included.
    """
    if tol <= 0:
        raise ValidationError("residual tolerance must be positive")
    dim = instance.dimension
    count = len(instance.poles)
    loops = build_loops(
        validate_system(instance.poles, first_order_seed(instance)),
        instance.base_point,
    )

    x = _pack(first_order_seed(instance), dim)
    computed = _forward(instance, loops, _unpack(x, count, dim), integration_tol)
    metric = _residual_metric(computed, instance.targets)
    residual = _residual_vector(computed, instance.targets)
    iterations = 0

    while metric > tol and iterations < max_iter:
        iterations += 1
        jacobian = np.empty((residual.size, x.size))
        for k in range(x.size):
            h = step_scale * max(1.0, abs(x[k]))
            xp = x.copy()
            xp[k] += h
            rp = _residual_vector(
                _forward(instance, loops, _unpack(xp, count, dim), jacobian_tol),
                instance.targets,
            )
            xm = x.copy()
            xm[k] -= h
            rm = _residual_vector(
                _forward(instance, loops, _unpack(xm, count, dim), jacobian_tol),
                instance.targets,
            )
            jacobian[:, k] = (rp - rm) / (2.0 * h)
        step, *_ = np.linalg.lstsq(jacobian, -residual, rcond=None)

        base_norm = float(np.linalg.norm(residual))
        alpha = 1.0
        improved = False
        while alpha > 1e-6:
            trial_x = x + alpha * step
            trial_computed = _forward(
                instance, loops, _unpack(trial_x, count, dim), integration_tol
            )
            trial_residual = _residual_vector(trial_computed, instance.targets)
            if float(np.linalg.norm(trial_residual)) < base_norm:
                x = trial_x
                computed = trial_computed
                residual = trial_residual
                metric = _residual_metric(computed, instance.targets)
                improved = True
                break
            alpha *= 0.5
        if not improved:
            break

    residues = _unpack(x, count, dim)
    resonance = is_non_resonant(validate_system(instance.poles, residues))
    frozen = []
    for a in residues:
        a = np.array(a, dtype=complex)
        a.flags.writeable = False
        frozen.append(a)
    return InverseSolution(
        residues=tuple(frozen),
        final_residual=metric,
        iterations=iterations,
        converged=metric <= tol,
        non_resonant=not any(r.resonant for r in resonance),
        resonance=tuple(resonance),
    )
