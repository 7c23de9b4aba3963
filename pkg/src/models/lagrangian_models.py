"""
Lagrangian Models Module
Points of the Lagrangian Grassmannian as symmetric unitaries, as orthogonal
anti-symplectic involutions of R^{2n} and as Lagrangian planes, plus the
product Theta(R, S) = RSR in each model.

Realification convention: x + iy in C^n <-> (x, y) in R^{2n},
J = [[0, -I], [I, 0]], tau = diag(I, -I), omega(u, v) = <Ju, v>.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from core.matrix_core import (
    ComplexMatrix,
    RealMatrix,
    as_complex_matrix,
    as_real_matrix,
    complexify,
    frobenius_dist,
    matrix_from_json,
    matrix_to_json,
    random_unitary,
    realify,
    sym_eig,
)
from utils.errors import DimensionMismatchError, InvariantViolationError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
MODEL_UNITARY = "symmetric_unitary"
MODEL_INVOLUTION = "involution"


def standard_complex_structure(n: int) -> RealMatrix:
    """J on R^{2n}, the realification of multiplication by i."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def tau(n: int) -> RealMatrix:
    """Coordinatewise complex conjugation on C^n as a real 2n x 2n matrix."""
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)]))


def omega(u: np.ndarray, v: np.ndarray) -> float:
    """Standard symplectic form omega(u, v) = <Ju, v> on R^{2n}."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1 or u.shape[0] % 2:
        raise DimensionMismatchError(f"Expected two vectors in R^2n, got {u.shape} and {v.shape}")
    return float(standard_complex_structure(u.shape[0] // 2) @ u @ v)


@dataclass(frozen=True, eq=False)
class SymmetricUnitary:
    """
    A point of the Lagrangian Grassmannian in the unitary model: A unitary, A conj(A) = id.

    Attributes:
        a: Complex n x n matrix
        tol: Validation tolerance
    """

    a: ComplexMatrix
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        a = as_complex_matrix(self.a).copy()
        eye = np.eye(a.shape[0])

        unitarity = frobenius_dist(a.conj().T @ a, eye)
        if unitarity >= self.tol:
            raise InvariantViolationError("unitary (A*A = id)", unitarity)

        reality = frobenius_dist(a @ a.conj(), eye)
        if reality >= self.tol:
            raise InvariantViolationError("A conj(A) = id", reality)

        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True, eq=False)
class AntiSympInvolution:
    """
    A point of the Lagrangian Grassmannian as an orthogonal anti-symplectic involution.

    Attributes:
        r: Real 2n x 2n matrix with R^T R = id, R^2 = id, R^T J R = -J
        tol: Validation tolerance
    """

    r: RealMatrix
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        r = as_real_matrix(self.r).copy()
        if r.shape[0] != r.shape[1] or r.shape[0] % 2:
            raise DimensionMismatchError(f"Expected a 2n x 2n matrix, got shape {r.shape}")
        eye = np.eye(r.shape[0])
        j = standard_complex_structure(r.shape[0] // 2)

        checks = {
            "orthogonal (R^T R = id)": frobenius_dist(r.T @ r, eye),
            "involution (R^2 = id)": frobenius_dist(r @ r, eye),
            "anti-symplectic (R^T J R = -J)": frobenius_dist(r.T @ j @ r, -j),
        }
        for name, deviation in checks.items():
            if deviation >= self.tol:
                raise InvariantViolationError(name, deviation)

        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def n(self) -> int:
        return self.r.shape[0] // 2


@dataclass(frozen=True, eq=False)
class LagrangianPlane:
    """
    A Lagrangian subspace of R^{2n} given by an orthonormal frame.

    Attributes:
        frame: Real n x 2n matrix whose rows span the plane
        tol: Validation tolerance
    """

    frame: RealMatrix
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        frame = as_real_matrix(self.frame).copy()
        n = frame.shape[0]
        if frame.shape[1] != 2 * n:
            raise DimensionMismatchError(f"Expected an n x 2n frame, got shape {frame.shape}")

        orthonormality = frobenius_dist(frame @ frame.T, np.eye(n))
        if orthonormality >= self.tol:
            raise InvariantViolationError("orthonormal frame", orthonormality)

        j = standard_complex_structure(n)
        isotropy = float(np.linalg.norm(frame @ j.T @ frame.T))
        if isotropy >= self.tol:
            raise InvariantViolationError("omega vanishes on the plane", isotropy)

        frame.setflags(write=False)
        object.__setattr__(self, "frame", frame)

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    @property
    def projector(self) -> RealMatrix:
        """Orthogonal projector onto the plane; the frame-independent description."""
        return self.frame.T @ self.frame


def _check_same_n(x: Any, y: Any) -> None:
    if x.n != y.n:
        raise DimensionMismatchError(f"Dimension mismatch: n={x.n} vs n={y.n}")


def theta_unitary(a: SymmetricUnitary, b: SymmetricUnitary) -> SymmetricUnitary:
    """
    The product Theta(A, B) = A conj(B) A in the unitary model.

    Args:
        a: First factor
        b: Second factor

    Returns:
        Product, re-validated with a tolerance of 10 * the inputs' tolerance
    """
    _check_same_n(a, b)
    product = a.a @ b.a.conj() @ a.a
    return SymmetricUnitary(product, tol=10 * max(a.tol, b.tol))


def theta0_unitary(a: SymmetricUnitary, b0: SymmetricUnitary) -> SymmetricUnitary:
    """Second-slot map Theta_0(A) = Theta(A, B_0)."""
    return theta_unitary(a, b0)


def theta_involution(r: AntiSympInvolution, s: AntiSympInvolution) -> AntiSympInvolution:
    """
    The product Theta(R, S) = RSR in the involution model.

    Args:
        r: First factor
        s: Second factor

    Returns:
        Product, re-validated with a tolerance of 10 * the inputs' tolerance
    """
    _check_same_n(r, s)
    return AntiSympInvolution(r.r @ s.r @ r.r, tol=10 * max(r.tol, s.tol))


def theta0_involution(r: AntiSympInvolution, r0: AntiSympInvolution) -> AntiSympInvolution:
    """Second-slot map Theta_0(R) = R R_0 R."""
    return theta_involution(r, r0)


def involution_to_unitary(r: AntiSympInvolution) -> SymmetricUnitary:
    """
    The unitary A with R = A o tau.

    Args:
        r: Orthogonal anti-symplectic involution

    Returns:
        Corresponding symmetric unitary
    """
    n = r.n
    linear = r.r @ tau(n)
    j = standard_complex_structure(n)

    commutator = frobenius_dist(linear @ j, j @ linear)
    if commutator >= r.tol:
        raise InvariantViolationError("R o tau is complex-linear", commutator)

    return SymmetricUnitary(complexify(linear), tol=r.tol)


def unitary_to_involution(a: SymmetricUnitary) -> AntiSympInvolution:
    """Inverse of involution_to_unitary: R = realify(A) tau."""
    return AntiSympInvolution(realify(a.a) @ tau(a.n), tol=a.tol)


def plane_from_involution(r: AntiSympInvolution) -> LagrangianPlane:
    """
    Fixed-point plane ker(R - id) of an involution.

    Args:
        r: Orthogonal anti-symplectic involution

    Returns:
        Plane spanned by the +1 eigenvectors of R
    """
    eigenvalues, vectors = sym_eig(0.5 * (r.r + r.r.T))
    plus = eigenvalues > 0
    dim = int(np.count_nonzero(plus))
    if dim != r.n:
        raise InvariantViolationError(
            "+1-eigenspace has dimension n", detail=f"found {dim}, expected {r.n}"
        )
    return LagrangianPlane(vectors[:, plus].T.copy(), tol=r.tol)


def involution_from_plane(plane: LagrangianPlane) -> AntiSympInvolution:
    """Reflection R = 2P - id through the plane."""
    r = 2.0 * plane.projector - np.eye(2 * plane.n)
    return AntiSympInvolution(r, tol=plane.tol)


def random_lagrangian(n: int, rng: np.random.Generator) -> SymmetricUnitary:
    """
    Sample a point A = U U^T for a Haar-random unitary U.

    Args:
        n: Dimension
        rng: Random stream

    Returns:
        Random symmetric unitary
    """
    u = random_unitary(n, rng)
    return SymmetricUnitary(u @ u.T, tol=1e-11)


def first_slot_involution_check(r0: SymmetricUnitary, s: SymmetricUnitary) -> float:
    """
    Deviation of S -> Theta(R_0, S) from being an involution at S.

    Returns:
        ||Theta(R_0, Theta(R_0, S)) - S||_F
    """
    once = theta_unitary(r0, s)
    twice = theta_unitary(r0, once)
    return frobenius_dist(twice.a, s.a)


Point = Union[SymmetricUnitary, AntiSympInvolution]


def point_to_json(point: Point) -> Dict[str, Any]:
    """
    Encode a point with its model tag.

    Args:
        point: Symmetric unitary or involution

    Returns:
        JSON-ready dictionary
    """
    if isinstance(point, SymmetricUnitary):
        return {"model": MODEL_UNITARY, **matrix_to_json(point.a)}
    if isinstance(point, AntiSympInvolution):
        data = matrix_to_json(point.r)
        return {"model": MODEL_INVOLUTION, "n": point.n, "entries": data["entries"]}
    raise TypeError(f"Unsupported point type {type(point).__name__}")


def point_from_json(data: Dict[str, Any], tol: float = DEFAULT_TOL) -> Point:
    """
    Decode a point, validating all invariants of its model.

    Args:
        data: Dictionary with "model", "n" and "entries"
        tol: Validation tolerance

    Returns:
        SymmetricUnitary or AntiSympInvolution
    """
    if not isinstance(data, dict):
        raise InvariantViolationError("matrix JSON layout", detail="top level is not an object")
    model = data.get("model", MODEL_UNITARY)

    if model == MODEL_UNITARY:
        return SymmetricUnitary(matrix_from_json(data), tol=tol)
    if model == MODEL_INVOLUTION:
        try:
            n = int(data["n"])
        except (KeyError, TypeError, ValueError) as e:
            raise InvariantViolationError("matrix JSON layout", detail=str(e)) from e
        r = matrix_from_json({"n": 2 * n, "entries": data.get("entries")})
        return AntiSympInvolution(r, tol=tol)
    raise InvariantViolationError("known model tag", detail=f"unknown model {model!r}")


def load_point(filepath: str, tol: float = DEFAULT_TOL) -> Point:
    """
    Load a point from a JSON file.

    Args:
        filepath: Path to the JSON file
        tol: Validation tolerance

    Returns:
        Decoded point
    """
    filepath = Path(filepath)
    if not filepath.exists():
        raise FileNotFoundError(f"Matrix file not found: {filepath}")

    try:
        with open(filepath, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in {filepath}: {e}")
        raise

    point = point_from_json(data, tol=tol)
    logger.debug(f"Loaded {type(point).__name__} (n={point.n}) from {filepath}")
    return point


def dump_point(point: Point, filepath: str) -> None:
    """Write a point to a JSON file."""
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, "w", encoding="utf-8") as f:
        json.dump(point_to_json(point), f, indent=2)
    logger.debug(f"Saved {type(point).__name__} to {filepath}")
