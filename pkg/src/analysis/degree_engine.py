"""
Degree Engine Module
Computes the mapping degree of Theta_0(A) = A conj(B) A at the regular value id.

The preimages of id are the diagonal matrices A^eps with entries
e^{i(theta_k/2 + eps_k pi)}. Each sign is the sign of det(alpha^eps), where
alpha^eps(Q) = 2 Re(U^eps Q (U^eps)^{-1}) acts on real symmetric matrices.
Signs are computed twice: through an LU determinant of the matrix of
alpha^eps and through the pair-count rule.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from core.matrix_core import ComplexMatrix, RealMatrix, as_real_matrix, det_sign_lu, frobenius_dist
from models.lagrangian_models import (
    SymmetricUnitary,
    tau,
    theta0_involution,
    theta0_unitary,
    unitary_to_involution,
)
from utils.errors import (
    DegeneracyError,
    InvariantViolationError,
    ScopeError,
    VerificationError,
)

logger = logging.getLogger(__name__)

MIN_ANGLE_GAP = 1e-9
COS_FACTOR_MIN = 1e-9
RESIDUAL_TOL = 1e-11
ALPHA_PATH_TOL = 1e-10
SYMMETRY_TOL = 1e-12
# Floor on the log Hadamard and column-spread ratios of alpha before a warning
REGULAR_LOG_DET_FLOOR = math.log(1e-8)


@dataclass(frozen=True, eq=False)
class AngleSpec:
    """
    Basepoint angles 0 < theta_1 < ... < theta_n < 2 pi.

    Attributes:
        thetas: Strictly increasing angles with gaps > 1e-9
    """

    thetas: Tuple[float, ...]

    def __post_init__(self):
        thetas = tuple(float(t) for t in self.thetas)
        if not thetas:
            raise InvariantViolationError("AngleSpec non-empty")
        if not all(math.isfinite(t) for t in thetas):
            raise InvariantViolationError("AngleSpec finite angles")
        if not (0.0 < thetas[0] and thetas[-1] < 2.0 * math.pi):
            raise InvariantViolationError(
                "AngleSpec range 0 < theta < 2 pi", detail=f"got {thetas[0]!r} .. {thetas[-1]!r}"
            )
        gaps = np.diff(thetas)
        if len(gaps) and float(np.min(gaps)) <= MIN_ANGLE_GAP:
            raise InvariantViolationError(
                "AngleSpec strictly increasing with gaps > 1e-9", float(np.min(gaps))
            )
        object.__setattr__(self, "thetas", thetas)

    @property
    def n(self) -> int:
        return len(self.thetas)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.thetas, dtype=np.float64)

    @classmethod
    def from_csv(cls, text: str) -> "AngleSpec":
        """Parse comma-separated angles (radians)."""
        try:
            values = [float(part) for part in text.split(",") if part.strip()]
        except ValueError as e:
            raise InvariantViolationError("AngleSpec numeric angles", detail=str(e)) from e
        return cls(tuple(values))


@dataclass(frozen=True)
class EpsSeq:
    """
    Binary sequence eps = (eps_1, ..., eps_n) indexing a preimage.

    Attributes:
        bits: Tuple of 0/1 values, eps_1 first
    """

    bits: Tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise InvariantViolationError("EpsSeq binary entries", detail=f"got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.bits, dtype=np.int64)

    @classmethod
    def all_of_length(cls, n: int) -> List["EpsSeq"]:
        """All 2^n sequences in lexicographic order 00...0, 00...1, ..., 11...1."""
        return [cls(bits) for bits in itertools.product((0, 1), repeat=n)]


@dataclass(frozen=True, eq=False)
class PreimagePoint:
    """A preimage A^eps of id together with its chart and both signs."""

    eps: EpsSeq
    a_eps: SymmetricUnitary
    u_eps: ComplexMatrix
    sign_numeric: int
    sign_analytic: int
    log_abs_det: float
    residual: float
    involution_residual: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps": list(self.eps.bits),
            "sign": self.sign_numeric,
            "residual": self.residual,
            "log_abs_det": self.log_abs_det,
        }


@dataclass(eq=False)
class DegreeReport:
    """
    Signed count of Theta_0^{-1}(id).

    Attributes:
        n: Dimension
        m: (n - 1) / 2
        degree_signed_sum: Sum of the numeric signs
        degree_closed_form: 2^{m+1}
        points: All 2^n preimages
        all_regular: True iff no numeric sign is 0
    """

    n: int
    m: int
    degree_signed_sum: int
    degree_closed_form: int
    points: List[PreimagePoint] = field(default_factory=list)
    all_regular: bool = True

    @property
    def verified(self) -> bool:
        return (
            self.all_regular
            and self.degree_signed_sum == self.degree_closed_form
            and all(p.sign_numeric == p.sign_analytic for p in self.points)
        )

    @property
    def max_residual(self) -> float:
        return max((p.residual for p in self.points), default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "degree": self.degree_signed_sum,
            "closed_form": self.degree_closed_form,
            "all_regular": self.all_regular,
            "points": [p.to_dict() for p in self.points],
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "eps": "".join(str(b) for b in p.eps.bits),
                    "sign_numeric": p.sign_numeric,
                    "sign_analytic": p.sign_analytic,
                    "log_abs_det": p.log_abs_det,
                    "residual": p.residual,
                }
                for p in self.points
            ]
        )


def _check_eps(spec: AngleSpec, eps: EpsSeq) -> None:
    if eps.n != spec.n:
        raise InvariantViolationError("EpsSeq length n", detail=f"got {eps.n}, expected {spec.n}")


def basepoint(spec: AngleSpec) -> SymmetricUnitary:
    """Diagonal basepoint B with entries e^{i theta_j}."""
    return SymmetricUnitary(np.diag(np.exp(1j * spec.array)))


def default_angles(n: int) -> AngleSpec:
    """Evenly spaced angles theta_j = 2 pi j / (n + 1)."""
    if n < 1:
        raise ScopeError(f"Dimension must be positive, got {n}")
    return AngleSpec(tuple(2.0 * math.pi * j / (n + 1) for j in range(1, n + 1)))


def random_angles(n: int, rng: np.random.Generator) -> AngleSpec:
    """
    Sample a valid AngleSpec uniformly on (0, 2 pi).

    Args:
        n: Dimension
        rng: Random stream

    Returns:
        Sorted random angles satisfying the gap constraint
    """
    if n < 1:
        raise ScopeError(f"Dimension must be positive, got {n}")
    while True:
        thetas = np.sort(rng.uniform(0.0, 2.0 * math.pi, size=n))
        if thetas[0] > 0.0 and np.all(np.diff(thetas) > MIN_ANGLE_GAP):
            return AngleSpec(tuple(thetas))


def preimage_matrix(spec: AngleSpec, eps: EpsSeq) -> ComplexMatrix:
    """Diagonal matrix A^eps with entries e^{i(theta_k/2 + eps_k pi)}."""
    _check_eps(spec, eps)
    return np.diag(np.exp(1j * (spec.array / 2.0 + eps.array * math.pi)))


def enumerate_preimages(spec: AngleSpec) -> List[Tuple[EpsSeq, SymmetricUnitary]]:
    """
    All 2^n solutions of Theta_0(A) = id.

    Args:
        spec: Basepoint angles

    Returns:
        List of (eps, A^eps) in lexicographic eps order
    """
    b = basepoint(spec)
    preimages = []
    for eps in EpsSeq.all_of_length(spec.n):
        a_eps = SymmetricUnitary(preimage_matrix(spec, eps))
        residual = frobenius_dist(theta0_unitary(a_eps, b).a, np.eye(spec.n))
        if residual >= RESIDUAL_TOL:
            raise VerificationError(f"Preimage residual {residual:.3e} for eps={eps.bits}")
        preimages.append((eps, a_eps))
    return preimages


def chart_unitary(spec: AngleSpec, eps: EpsSeq) -> ComplexMatrix:
    """Diagonal U^eps with entries e^{i(theta_k/4 + eps_k pi/2)}, so A^eps = U^eps conj(U^eps)^{-1}."""
    _check_eps(spec, eps)
    return np.diag(np.exp(1j * (spec.array / 4.0 + eps.array * math.pi / 2.0)))


def sym_basis(n: int) -> List[RealMatrix]:
    """
    Orthonormal basis of Sym(n) under <X, Y> = trace(X Y^T).

    E_jj for j = 1..n first, then (E_jk + E_kj)/sqrt(2) for j < k in
    lexicographic order.

    Args:
        n: Dimension

    Returns:
        List of n(n+1)/2 symmetric matrices
    """
    if n < 1:
        raise ScopeError(f"Dimension must be positive, got {n}")
    basis = []
    for j in range(n):
        e = np.zeros((n, n))
        e[j, j] = 1.0
        basis.append(e)
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n))
            e[j, k] = e[k, j] = 1.0 / math.sqrt(2.0)
            basis.append(e)
    return basis


def _basis_pairs(n: int) -> List[Tuple[int, int]]:
    return [(j, j) for j in range(n)] + [(j, k) for j in range(n) for k in range(j + 1, n)]


def _check_sym(q: RealMatrix, n: int) -> RealMatrix:
    q = as_real_matrix(q)
    if q.shape != (n, n):
        raise InvariantViolationError("Q is n x n", detail=f"got shape {q.shape}")
    deviation = float(np.max(np.abs(q - q.T)))
    if deviation > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(q)))):
        raise InvariantViolationError("Q symmetric", deviation)
    return q


def alpha_factors(spec: AngleSpec, eps: EpsSeq) -> RealMatrix:
    """Matrix of factors 2 cos((theta_j - theta_k)/4 + (eps_j - eps_k) pi/2)."""
    _check_eps(spec, eps)
    theta = spec.array
    e = eps.array.astype(np.float64)
    phase = (theta[:, None] - theta[None, :]) / 4.0 + (e[:, None] - e[None, :]) * math.pi / 2.0
    return 2.0 * np.cos(phase)


def alpha_factor(spec: AngleSpec, eps: EpsSeq, j: int, k: int) -> float:
    """Single factor of alpha^eps on the (j, k) entry (0-based indices)."""
    return float(alpha_factors(spec, eps)[j, k])


def alpha_apply(spec: AngleSpec, eps: EpsSeq, q: RealMatrix) -> RealMatrix:
    """
    alpha^eps(Q) = 2 Re(U^eps Q (U^eps)^{-1}) by the entrywise closed form.

    Args:
        spec: Basepoint angles
        eps: Preimage index
        q: Real symmetric matrix

    Returns:
        Real symmetric matrix
    """
    q = _check_sym(q, spec.n)
    return alpha_factors(spec, eps) * q


def alpha_apply_direct(spec: AngleSpec, eps: EpsSeq, q: RealMatrix) -> RealMatrix:
    """
    alpha^eps(Q) through the unsimplified chain.

    T = U^eps (iQ) conj(U^eps)^{-1} is mapped by
    dTheta_0(T) = T conj(B) A^eps + A^eps conj(B) T into T_id = {iQ'}, and Q'
    is read off as the imaginary part. The result must agree with alpha_apply.

    Args:
        spec: Basepoint angles
        eps: Preimage index
        q: Real symmetric matrix

    Returns:
        Real symmetric matrix
    """
    q = _check_sym(q, spec.n)
    u = chart_unitary(spec, eps)
    a_eps = preimage_matrix(spec, eps)
    b_conj = np.conj(basepoint(spec).a)

    t = u @ (1j * q) @ np.linalg.inv(np.conj(u))
    image = t @ b_conj @ a_eps + a_eps @ b_conj @ t
    direct = image.imag

    closed = alpha_apply(spec, eps, q)
    mismatch = float(np.linalg.norm(direct - closed)) + float(np.linalg.norm(image.real))
    if mismatch >= ALPHA_PATH_TOL * max(1.0, float(np.linalg.norm(q))):
        raise VerificationError(
            f"alpha paths disagree by {mismatch:.3e} for eps={eps.bits}"
        )
    return direct


def alpha_matrix(spec: AngleSpec, eps: EpsSeq) -> RealMatrix:
    """
    Matrix of alpha^eps in sym_basis.

    Args:
        spec: Basepoint angles
        eps: Preimage index

    Returns:
        N x N real matrix, N = n(n+1)/2, column i holding the coordinates of
        alpha^eps(basis_i)
    """
    basis = sym_basis(spec.n)
    stacked = np.stack(basis)
    columns = [
        np.tensordot(stacked, alpha_apply(spec, eps, e), axes=([1, 2], [0, 1])) for e in basis
    ]
    return np.column_stack(columns)


def sign_analytic(spec: AngleSpec, eps: EpsSeq) -> int:
    """
    Sign of det(alpha^eps) by the pair rule: (-1)^{#{j<k : eps_j = 0, eps_k = 1}}.

    Each factor is also checked to stay away from zero.

    Args:
        spec: Basepoint angles
        eps: Preimage index

    Returns:
        -1 or +1
    """
    factors = alpha_factors(spec, eps)
    n = spec.n
    rows, cols = np.triu_indices(n)
    smallest = float(np.min(np.abs(factors[rows, cols]))) / 2.0
    if smallest <= COS_FACTOR_MIN:
        raise DegeneracyError(
            f"cosine factor {smallest:.3e} too close to zero for eps={eps.bits}"
        )

    zeros_seen = 0
    pairs = 0
    for bit in eps.bits:
        if bit == 0:
            zeros_seen += 1
        else:
            pairs += zeros_seen
    return -1 if pairs % 2 else 1


def det_analytic(spec: AngleSpec, eps: EpsSeq) -> Tuple[int, float]:
    """
    det(alpha^eps) as the product of its factors over j <= k.

    Returns:
        Tuple of (sign, log|det|)
    """
    factors = alpha_factors(spec, eps)
    rows, cols = np.triu_indices(spec.n)
    values = factors[rows, cols]
    sign = -1 if int(np.count_nonzero(values < 0)) % 2 else 1
    return sign, float(np.sum(np.log(np.abs(values))))


def preimage_point(spec: AngleSpec, eps: EpsSeq) -> PreimagePoint:
    """
    Build the full record for one preimage.

    Args:
        spec: Basepoint angles
        eps: Preimage index

    Returns:
        PreimagePoint with numeric and analytic signs
    """
    n = spec.n
    b = basepoint(spec)
    a_eps = SymmetricUnitary(preimage_matrix(spec, eps))
    u_eps = chart_unitary(spec, eps)

    factorization = frobenius_dist(u_eps @ np.linalg.inv(np.conj(u_eps)), a_eps.a)
    if factorization >= 1e-12 * max(1.0, math.sqrt(n)):
        raise VerificationError(f"chart factorization residual {factorization:.3e}")

    residual = frobenius_dist(theta0_unitary(a_eps, b).a, np.eye(n))

    # Same check in the involution model: R^eps R_0 R^eps = tau
    involution = theta0_involution(unitary_to_involution(a_eps), unitary_to_involution(b))
    involution_residual = frobenius_dist(involution.r, tau(n))

    matrix = alpha_matrix(spec, eps)
    sign_numeric, log_abs_det = det_sign_lu(matrix)

    if sign_numeric != 0:
        column_norms = np.linalg.norm(matrix, axis=0)
        # Hadamard ratio |det| / prod ||col|| and smallest-to-largest column ratio
        hadamard = log_abs_det - float(np.sum(np.log(column_norms)))
        spread = math.log(float(column_norms.min() / column_norms.max()))
        if min(hadamard, spread) < REGULAR_LOG_DET_FLOOR:
            logger.warning(f"Near-singular alpha for eps={eps.bits}: log|det|={log_abs_det:.3f}")

    point = PreimagePoint(
        eps=eps,
        a_eps=a_eps,
        u_eps=u_eps,
        sign_numeric=sign_numeric,
        sign_analytic=sign_analytic(spec, eps),
        log_abs_det=log_abs_det,
        residual=residual,
        involution_residual=involution_residual,
    )
    logger.debug(
        f"eps={eps.bits} sign={point.sign_numeric}/{point.sign_analytic} "
        f"residual={residual:.2e} log|det|={log_abs_det:.4f}"
    )
    return point


def degree(spec: AngleSpec, strict: bool = True) -> DegreeReport:
    """
    Signed count of Theta_0^{-1}(id) for odd n.

    Args:
        spec: Basepoint angles (n odd)
        strict: Raise on a non-regular point or any disagreement; otherwise
            return the report and let the caller inspect `verified`

    Returns:
        DegreeReport
    """
    n = spec.n
    if n % 2 == 0:
        raise ScopeError(
            f"degree undefined: Lagrangian Grassmannian non-orientable for n even (n={n})"
        )
    m = (n - 1) // 2

    points = [preimage_point(spec, eps) for eps, _ in enumerate_preimages(spec)]
    all_regular = all(p.sign_numeric != 0 for p in points)
    report = DegreeReport(
        n=n,
        m=m,
        degree_signed_sum=sum(p.sign_numeric for p in points),
        degree_closed_form=2 ** (m + 1),
        points=points,
        all_regular=all_regular,
    )
    logger.info(
        f"Degree for n={n}: signed sum {report.degree_signed_sum}, "
        f"closed form {report.degree_closed_form}, all regular={all_regular}"
    )

    if strict:
        if not all_regular:
            singular = [p.eps.bits for p in points if p.sign_numeric == 0]
            raise DegeneracyError(f"Non-regular preimages: {singular}")
        disagree = [p.eps.bits for p in points if p.sign_numeric != p.sign_analytic]
        if disagree:
            raise VerificationError(f"Numeric and analytic signs disagree for {disagree}")
        if report.degree_signed_sum != report.degree_closed_form:
            raise VerificationError(
                f"Signed sum {report.degree_signed_sum} != 2^(m+1) = {report.degree_closed_form}"
            )
    return report


def degree_signed_sum_analytic(spec: AngleSpec) -> int:
    """Sum of analytic signs over all eps, valid for any n."""
    return sum(sign_analytic(spec, eps) for eps in EpsSeq.all_of_length(spec.n))


def parse_angles(text: Optional[str], n: int) -> AngleSpec:
    """
    Angles from a CSV string, or the default angles when none are given.

    Args:
        text: Comma-separated angles or None
        n: Expected dimension

    Returns:
        AngleSpec of length n
    """
    if text is None:
        return default_angles(n)
    spec = AngleSpec.from_csv(text)
    if spec.n != n:
        raise InvariantViolationError("AngleSpec length n", detail=f"got {spec.n} angles for n={n}")
    return spec

