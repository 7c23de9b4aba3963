"""
Numeric Search Module
Finds the solutions of Theta_0(A) = id by multistart Gauss-Newton on the
Lagrangian Grassmannian and matches them against the closed-form preimages.

Each local solve works in the chart Q -> U e^{iQ} conj(U)^{-1} around the
current iterate and re-centers the chart after every accepted step.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from analysis.degree_engine import (
    AngleSpec,
    EpsSeq,
    basepoint,
    default_angles,
    enumerate_preimages,
    sym_basis,
)
from core.matrix_core import (
    ComplexMatrix,
    RealMatrix,
    expi_sym,
    frobenius_dist,
    matrix_to_json,
    orthonormalize,
    random_unitary,
)
from models.lagrangian_models import SymmetricUnitary
from utils.errors import InvariantViolationError

logger = logging.getLogger(__name__)

MAX_HALVINGS = 30
SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class SearchConfig:
    """
    Parameters of a multistart search.

    Attributes:
        n: Dimension
        spec: Basepoint angles defining Theta_0
        starts: Number of random starting points
        max_iter: Gauss-Newton iteration cap per start
        step_tol: Convergence bound on the chart step
        residual_tol: Convergence bound on ||Theta_0(A) - id||_F
        dedup_tol: Distance below which two solutions coincide
        seed: Base seed; start i uses the stream (seed, i)
        fd_step: Central finite-difference step
        reorthonormalize_every: Iterations between QR clean-ups of the chart unitary
        workers: Worker processes (speed only)
    """

    n: int
    spec: AngleSpec
    starts: int = 500
    max_iter: int = 50
    step_tol: float = 1e-12
    residual_tol: float = 1e-10
    dedup_tol: float = 1e-6
    seed: int = 7
    fd_step: float = 1e-6
    reorthonormalize_every: int = 10
    workers: int = 1

    def __post_init__(self):
        if self.n < 1 or self.spec.n != self.n:
            raise InvariantViolationError(
                "SearchConfig dimension", detail=f"n={self.n}, spec has {self.spec.n} angles"
            )
        if self.starts < 0 or self.max_iter < 1:
            raise InvariantViolationError("SearchConfig counts", detail="starts >= 0, max_iter >= 1")
        for name in ("step_tol", "residual_tol", "dedup_tol", "fd_step"):
            if not getattr(self, name) > 0:
                raise InvariantViolationError(f"SearchConfig {name} positive")
        if not self.dedup_tol > self.residual_tol:
            raise InvariantViolationError("SearchConfig dedup_tol > residual_tol")
        object.__setattr__(self, "seed", int(self.seed) & SEED_MASK)

    @classmethod
    def from_config(
        cls,
        n: int,
        config: Optional[Dict] = None,
        spec: Optional[AngleSpec] = None,
        **overrides: Any,
    ) -> "SearchConfig":
        """
        Build from the `search` section of a configuration dictionary.

        Args:
            n: Dimension
            config: Configuration dictionary
            spec: Basepoint angles (default angles when omitted)
            overrides: Explicit values taking precedence (None values ignored)

        Returns:
            SearchConfig
        """
        config = config or {}
        search_config = config.get("search", {})
        values = {
            "starts": search_config.get("starts", 500),
            "max_iter": search_config.get("max_iter", 50),
            "step_tol": search_config.get("step_tol", 1e-12),
            "residual_tol": search_config.get("residual_tol", 1e-10),
            "dedup_tol": search_config.get("dedup_tol", 1e-6),
            "seed": search_config.get("seed", 7),
            "fd_step": search_config.get("fd_step", 1e-6),
            "reorthonormalize_every": search_config.get("reorthonormalize_every", 10),
            "workers": config.get("runtime", {}).get("workers", 1),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(n=n, spec=spec or default_angles(n), **values)


@dataclass
class LocalSolution:
    """Converged point of one local solve."""

    a: SymmetricUnitary
    u: ComplexMatrix
    iterations: int
    residual: float


@dataclass(eq=False)
class SearchOutcome:
    """
    Result of a multistart search.

    Attributes:
        solutions: Deduplicated converged points
        matched: For each solution, the eps of the nearest A^eps within dedup_tol, or None
        coverage: Fraction of the 2^n closed-form preimages hit
        strays: Converged points (before deduplication) matching no A^eps
        converged: Number of starts that converged
        failures: Number of starts that did not converge
    """

    solutions: List[SymmetricUnitary] = field(default_factory=list)
    matched: List[Optional[EpsSeq]] = field(default_factory=list)
    coverage: float = 0.0
    strays: int = 0
    converged: int = 0
    failures: int = 0
    max_match_distance: float = 0.0

    @property
    def complete(self) -> bool:
        return self.coverage == 1.0 and self.strays == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "solutions": [matrix_to_json(s.a) for s in self.solutions],
            "coverage": self.coverage,
            "strays": self.strays,
            "matched": [list(e.bits) if e is not None else None for e in self.matched],
        }


def retract(u: ComplexMatrix, q: RealMatrix) -> Tuple[SymmetricUnitary, ComplexMatrix]:
    """
    Move along the chart at U.

    Args:
        u: Chart unitary
        q: Real symmetric chart coordinate

    Returns:
        Tuple of (A = U e^{iQ} conj(U)^{-1}, U_new = U e^{iQ/2}) with
        A = U_new conj(U_new)^{-1}
    """
    for attempt in range(2):
        u_new = u @ expi_sym(0.5 * np.asarray(q))
        a = u_new @ np.linalg.inv(np.conj(u_new))
        try:
            return SymmetricUnitary(a), u_new
        except InvariantViolationError as e:
            if attempt:
                raise
            logger.debug(f"Retraction drifted ({e}); re-orthonormalizing chart unitary")
            u = orthonormalize(u)
    raise AssertionError("unreachable")


def residual_vector(a: SymmetricUnitary, b: SymmetricUnitary) -> np.ndarray:
    """
    Real and imaginary parts of A conj(B) A - id, flattened row-major.

    Args:
        a: Point
        b: Basepoint

    Returns:
        Vector of length 2 n^2 whose norm is ||Theta_0(A) - id||_F
    """
    d = a.a @ np.conj(b.a) @ a.a - np.eye(a.n)
    return np.concatenate([d.real.ravel(), d.imag.ravel()])


def _chart_q(basis: np.ndarray, coords: np.ndarray) -> RealMatrix:
    return np.tensordot(coords, basis, axes=1)


def local_solve(
    u0: ComplexMatrix,
    config: SearchConfig,
    b: Optional[SymmetricUnitary] = None,
) -> Optional[LocalSolution]:
    """
    Damped Gauss-Newton from the point U0 conj(U0)^{-1}.

    The Jacobian of residual_vector with respect to the n(n+1)/2 chart
    coordinates is taken by central finite differences. A step is halved until
    the residual decreases. Convergence requires residual < residual_tol and
    step < step_tol; a step search that stalls below residual_tol also counts
    as converged.

    Args:
        u0: Chart unitary of the start
        config: Search parameters
        b: Basepoint (from config.spec when omitted)

    Returns:
        LocalSolution, or None on failure
    """
    b = b or basepoint(config.spec)
    basis = np.stack(sym_basis(config.n))
    h = config.fd_step

    u = np.asarray(u0, dtype=np.complex128)
    a, u = retract(u, np.zeros((config.n, config.n)))
    f = residual_vector(a, b)
    r = float(np.linalg.norm(f))

    for iteration in range(config.max_iter):
        columns = []
        for e in basis:
            plus = residual_vector(retract(u, h * e)[0], b)
            minus = residual_vector(retract(u, -h * e)[0], b)
            columns.append((plus - minus) / (2.0 * h))
        jacobian = np.column_stack(columns)

        delta, *_ = np.linalg.lstsq(jacobian, -f, rcond=None)
        step = float(np.linalg.norm(delta))
        if r < config.residual_tol and step < config.step_tol:
            return LocalSolution(a=a, u=u, iterations=iteration, residual=r)

        t = 1.0
        accepted = False
        for _ in range(MAX_HALVINGS):
            a_try, u_try = retract(u, _chart_q(basis, t * delta))
            f_try = residual_vector(a_try, b)
            r_try = float(np.linalg.norm(f_try))
            if r_try < r:
                accepted = True
                break
            t *= 0.5

        if not accepted:
            if r < config.residual_tol:
                return LocalSolution(a=a, u=u, iterations=iteration, residual=r)
            logger.debug(f"Step search stalled at residual {r:.3e} after {iteration} iterations")
            return None

        a, u, f, r = a_try, u_try, f_try, r_try
        if (iteration + 1) % config.reorthonormalize_every == 0:
            u = orthonormalize(u)

        if r < config.residual_tol and t * step < config.step_tol:
            return LocalSolution(a=a, u=u, iterations=iteration + 1, residual=r)

    logger.debug(f"No convergence after {config.max_iter} iterations (residual {r:.3e})")
    return None


def start_stream(seed: int, index: int) -> np.random.Generator:
    """Independent random stream for one start, fixed by (seed, index)."""
    return np.random.default_rng([int(seed) & SEED_MASK, index])


def _solve_start(args: Tuple[SearchConfig, int]) -> Optional[LocalSolution]:
    config, index = args
    u0 = random_unitary(config.n, start_stream(config.seed, index))
    return local_solve(u0, config)


class MultistartSearcher:
    """
    Runs local solves from random starting points and reduces their results.
    """

    def __init__(self, config: SearchConfig, show_progress: bool = False):
        """
        Initialize the searcher.

        Args:
            config: Search parameters
            show_progress: Draw a tqdm progress bar on stderr
        """
        self.config = config
        self.show_progress = show_progress
        self.preimages = enumerate_preimages(config.spec)
        logger.info(
            f"Multistart search initialized: n={config.n}, starts={config.starts}, "
            f"seed={config.seed}, workers={config.workers}"
        )

    def _run_starts(self) -> List[Optional[LocalSolution]]:
        jobs = [(self.config, i) for i in range(self.config.starts)]
        progress = dict(total=len(jobs), disable=not self.show_progress, desc="starts")

        if self.config.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
                return list(tqdm(pool.map(_solve_start, jobs, chunksize=8), **progress))
        return [_solve_start(job) for job in tqdm(jobs, **progress)]

    def match(self, a: SymmetricUnitary) -> Tuple[Optional[EpsSeq], float]:
        """
        Nearest closed-form preimage.

        Args:
            a: Converged point

        Returns:
            Tuple of (eps if within dedup_tol else None, distance to the nearest A^eps)
        """
        distances = [frobenius_dist(a.a, a_eps.a) for _, a_eps in self.preimages]
        best = int(np.argmin(distances))
        if distances[best] < self.config.dedup_tol:
            return self.preimages[best][0], distances[best]
        return None, distances[best]

    def run(self) -> SearchOutcome:
        """
        Run all starts, deduplicate and match.

        Returns:
            SearchOutcome
        """
        outcome = SearchOutcome()
        if self.config.starts == 0:
            logger.warning("No starts requested; empty outcome")
            return outcome

        hit = set()
        for result in self._run_starts():
            if result is None:
                outcome.failures += 1
                continue
            outcome.converged += 1

            eps, distance = self.match(result.a)
            if eps is None:
                outcome.strays += 1
                logger.warning(f"Converged point matches no closed-form preimage (distance {distance:.3e})")
            else:
                hit.add(eps)
                outcome.max_match_distance = max(outcome.max_match_distance, distance)

            if all(frobenius_dist(result.a.a, s.a) > self.config.dedup_tol for s in outcome.solutions):
                outcome.solutions.append(result.a)
                outcome.matched.append(eps)

        outcome.coverage = len(hit) / len(self.preimages)
        logger.info(
            f"Search finished: {len(outcome.solutions)} solutions, coverage {outcome.coverage:.3f}, "
            f"strays {outcome.strays}, failures {outcome.failures}"
        )
        if outcome.coverage < 1.0:
            logger.warning(f"Coverage {outcome.coverage:.3f} < 1 with {self.config.starts} starts")
        return outcome


def multistart(config: SearchConfig, show_progress: bool = False) -> SearchOutcome:
    """Run a multistart search with the given configuration."""
    return MultistartSearcher(config, show_progress=show_progress).run()
