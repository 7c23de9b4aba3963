"""
Gamma Framework Module
The product (g, h) -> g h^{-1} g on a matrix group, its restriction to the
fixed set of an involutive anti-isomorphism I, and the two fixed sets that
fail to give a Gamma-structure: the disconnected union of Grassmannians
Fix(g -> g^{-1}) in O(n) / U(n), and Fix(transpose) in SU(2), a 2-sphere.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Tuple

import numpy as np

from core.matrix_core import (
    ComplexMatrix,
    as_complex_matrix,
    frobenius_dist,
    is_unitary,
    random_orthogonal,
    random_unitary,
)
from models.lagrangian_models import random_lagrangian
from utils.errors import DegeneracyError, InvariantViolationError, ScopeError

logger = logging.getLogger(__name__)

MEMBERSHIP_TOL = 1e-10
COND_MAX = 1e12


class AntiIso(Enum):
    """Involutive anti-isomorphisms of a matrix group."""

    TRANSPOSE = "transpose"
    INVERSE = "inverse"

    def apply(self, g: ComplexMatrix) -> ComplexMatrix:
        g = as_complex_matrix(g)
        if self is AntiIso.TRANSPOSE:
            return g.T.copy()
        return _inverse(g)


class Group(Enum):
    """Matrix groups the samples are drawn from."""

    U = "U"
    O = "O"
    SU = "SU"

    def contains(self, g: ComplexMatrix, tol: float = MEMBERSHIP_TOL) -> bool:
        g = as_complex_matrix(g)
        if not is_unitary(g, tol):
            return False
        if self is Group.O:
            return float(np.max(np.abs(g.imag))) < tol
        if self is Group.SU:
            return abs(np.linalg.det(g) - 1.0) < tol
        return True


@dataclass(frozen=True, eq=False)
class FixSample:
    """
    A group element fixed by an anti-isomorphism.

    Attributes:
        g: Group element
        group: Ambient group
        anti_iso: Anti-isomorphism fixing g
    """

    g: ComplexMatrix
    group: Group
    anti_iso: AntiIso

    def __post_init__(self):
        g = as_complex_matrix(self.g).copy()
        if not self.group.contains(g):
            raise InvariantViolationError(f"membership in {self.group.value}({g.shape[0]})")
        deviation = frobenius_dist(self.anti_iso.apply(g), g)
        if deviation >= MEMBERSHIP_TOL:
            raise InvariantViolationError(f"fixed by {self.anti_iso.value}", deviation)
        g.setflags(write=False)
        object.__setattr__(self, "g", g)


def _inverse(h: ComplexMatrix) -> ComplexMatrix:
    if np.linalg.cond(h) > COND_MAX:
        raise DegeneracyError("Matrix is not invertible")
    return np.linalg.inv(h)


def gamma_product(g: ComplexMatrix, h: ComplexMatrix) -> ComplexMatrix:
    """
    The product g h^{-1} g.

    Args:
        g: First factor
        h: Second factor (invertible)

    Returns:
        g h^{-1} g
    """
    g = as_complex_matrix(g)
    h = as_complex_matrix(h)
    if g.shape != h.shape:
        raise InvariantViolationError("equal dimensions", detail=f"{g.shape} vs {h.shape}")
    return g @ _inverse(h) @ g


def fix_closure_check(pairs: Iterable[Tuple[FixSample, FixSample]]) -> float:
    """
    Largest deviation of g h^{-1} g from Fix(I) over sample pairs.

    Args:
        pairs: Pairs from the same group and anti-isomorphism

    Returns:
        max ||I(g h^{-1} g) - g h^{-1} g||_F (0.0 for no pairs)
    """
    worst = 0.0
    for first, second in pairs:
        if first.group is not second.group or first.anti_iso is not second.anti_iso:
            raise InvariantViolationError(
                "pair from the same fixed set",
                detail=f"{first.group.value}/{first.anti_iso.value} vs "
                f"{second.group.value}/{second.anti_iso.value}",
            )
        product = gamma_product(first.g, second.g)
        worst = max(worst, frobenius_dist(first.anti_iso.apply(product), product))
    return worst


def grassmannian_component(g: ComplexMatrix) -> int:
    """
    Component index k of an element of Fix(g -> g^{-1}) in O(n).

    Args:
        g: Real orthogonal symmetric involution

    Returns:
        Dimension k of the +1 eigenspace, 0 <= k <= n
    """
    g = as_complex_matrix(g)
    n = g.shape[0]
    eye = np.eye(n)
    if (
        float(np.max(np.abs(g.imag))) > 1e-9
        or frobenius_dist(g.T, g) > 1e-9
        or frobenius_dist(g @ g, eye) > 1e-9
    ):
        raise InvariantViolationError("real symmetric orthogonal involution")

    trace = float(np.trace(g).real)
    nearest = round(trace)
    if abs(trace - nearest) > 1e-6 or (nearest - n) % 2:
        raise InvariantViolationError(
            "trace is an integer of the parity of n", detail=f"trace={trace!r}, n={n}"
        )
    return (n + nearest) // 2


def random_involution(n: int, rng: np.random.Generator, complex_: bool = False) -> ComplexMatrix:
    """
    V diag(+-1) V^* for a random orthogonal (or unitary) V and random signs.

    Args:
        n: Dimension
        rng: Random stream
        complex_: Draw V from U(n) instead of O(n)

    Returns:
        Element of Fix(g -> g^{-1})
    """
    signs = rng.choice([-1.0, 1.0], size=n)
    v = random_unitary(n, rng) if complex_ else random_orthogonal(n, rng).astype(np.complex128)
    g = (v * signs[np.newaxis, :]) @ v.conj().T
    return 0.5 * (g + g.conj().T)


def component_spectrum(n: int, samples: int, rng: np.random.Generator) -> List[int]:
    """
    Component indices of random elements of Fix(g -> g^{-1}) in O(n).

    Each sample is also multiplied by a second involution h as h g^{-1} h and
    its index is checked to be unchanged.

    Args:
        n: Dimension
        samples: Number of samples
        rng: Random stream

    Returns:
        List of k values, one per sample
    """
    spectrum = []
    for _ in range(samples):
        g = random_involution(n, rng)
        h = random_involution(n, rng)
        k = grassmannian_component(g)
        k_product = grassmannian_component(gamma_product(h, g))
        if k_product != k:
            raise InvariantViolationError(
                "component index preserved by the product", detail=f"{k} -> {k_product}"
            )
        spectrum.append(k)
    logger.debug(f"Component spectrum n={n}: {sorted(set(spectrum))}")
    return spectrum


def su2_fix_point(p: np.ndarray) -> ComplexMatrix:
    """
    Symmetric SU(2) matrix of a unit vector p in R^3.

    Args:
        p: Unit vector (p1, p2, p3)

    Returns:
        [[p1 + i p2, i p3], [i p3, p1 - i p2]]
    """
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (3,):
        raise ScopeError(f"Expected a vector in R^3, got shape {p.shape}")
    norm = float(np.linalg.norm(p))
    if abs(norm - 1.0) > 1e-10:
        raise ScopeError(f"Expected a unit vector, got |p| = {norm!r}")
    p1, p2, p3 = p
    return np.array([[p1 + 1j * p2, 1j * p3], [1j * p3, p1 - 1j * p2]], dtype=np.complex128)


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def sample_fix(group: Group, anti_iso: AntiIso, n: int, rng: np.random.Generator) -> FixSample:
    """
    Random element of Fix(I) in a group.

    Supported: transpose-fixed unitaries (symmetric unitaries), inverse-fixed
    orthogonals and unitaries (involutions), transpose-fixed SU(2).

    Args:
        group: Ambient group
        anti_iso: Anti-isomorphism
        n: Dimension
        rng: Random stream

    Returns:
        FixSample
    """
    if anti_iso is AntiIso.TRANSPOSE and group is Group.U:
        return FixSample(random_lagrangian(n, rng).a, group, anti_iso)
    if anti_iso is AntiIso.INVERSE and group is Group.O:
        return FixSample(random_involution(n, rng).real.astype(np.complex128), group, anti_iso)
    if anti_iso is AntiIso.INVERSE and group is Group.U:
        return FixSample(random_involution(n, rng, complex_=True), group, anti_iso)
    if anti_iso is AntiIso.TRANSPOSE and group is Group.SU:
        if n != 2:
            raise ScopeError(f"Fix(transpose) in SU(n) is only sampled for n = 2, got n={n}")
        return FixSample(su2_fix_point(random_unit_vector(rng)), group, anti_iso)
    raise ScopeError(f"No sampler for Fix({anti_iso.value}) in {group.value}(n)")


def closure_summary(
    n: int, trials: int, rng: np.random.Generator
) -> Dict[str, float]:
    """
    Closure deviation for every supported fixed set.

    Args:
        n: Dimension (SU(2) always uses n = 2)
        trials: Pairs per fixed set
        rng: Random stream

    Returns:
        Mapping "group/anti_iso" -> max deviation
    """
    cases = [
        (Group.U, AntiIso.TRANSPOSE, n),
        (Group.O, AntiIso.INVERSE, n),
        (Group.U, AntiIso.INVERSE, n),
        (Group.SU, AntiIso.TRANSPOSE, 2),
    ]
    summary = {}
    for group, anti_iso, dim in cases:
        pairs = [
            (sample_fix(group, anti_iso, dim, rng), sample_fix(group, anti_iso, dim, rng))
            for _ in range(trials)
        ]
        summary[f"{group.value}/{anti_iso.value}"] = fix_closure_check(pairs)
    return summary


def anti_iso_law_deviation(
    anti_iso: AntiIso, n: int, trials: int, rng: np.random.Generator
) -> float:
    """
    Largest deviation from I(gh) = I(h) I(g) and I(I(g)) = g on random unitaries.

    Args:
        anti_iso: Anti-isomorphism under test
        n: Dimension
        trials: Number of random pairs
        rng: Random stream

    Returns:
        Max deviation over both laws
    """
    worst = 0.0
    for _ in range(trials):
        g = random_unitary(n, rng)
        h = random_unitary(n, rng)
        worst = max(
            worst,
            frobenius_dist(anti_iso.apply(g @ h), anti_iso.apply(h) @ anti_iso.apply(g)),
            frobenius_dist(anti_iso.apply(anti_iso.apply(g)), g),
        )
    return worst
