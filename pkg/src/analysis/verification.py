"""
Verification Module
Randomized property suite over the models, the product and the framework.

Every check draws its own samples from a seeded stream and reports the
largest deviation it saw against a fixed bound.
"""

import logging
from functools import partial
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from analysis.degree_engine import default_angles, degree, random_angles
from core.matrix_core import frobenius_dist
from framework.gamma_framework import (
    AntiIso,
    Group,
    anti_iso_law_deviation,
    component_spectrum,
    fix_closure_check,
    gamma_product,
    random_unit_vector,
    sample_fix,
    su2_fix_point,
)
from models.lagrangian_models import (
    SymmetricUnitary,
    first_slot_involution_check,
    involution_from_plane,
    involution_to_unitary,
    plane_from_involution,
    random_lagrangian,
    theta_involution,
    theta_unitary,
    unitary_to_involution,
)
from utils.errors import DimensionMismatchError, InvariantViolationError, LagrangianGammaError

logger = logging.getLogger(__name__)

CLOSURE_TOL = 1e-9
ROUND_TRIP_TOL = 1e-10
GAMMA_THETA_TOL = 1e-10
ANTI_ISO_TOL = 1e-10
SU2_TOL = 1e-12
MIN_DISTINCT_COMPONENTS = 2


@dataclass
class CheckResult:
    """
    Outcome of one property check.

    Attributes:
        name: Property name
        value: Largest deviation (or the observed count for counting checks)
        bound: Bound the value is compared against
        relation: "<=" for deviations, ">=" for counts, "==" for exact checks
        passed: Whether the comparison holds
        detail: Free text, set when the check raised
    """

    name: str
    value: float
    bound: float
    relation: str = "<="
    passed: bool = True
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.name,
            "value": float(self.value),
            "relation": self.relation,
            "bound": float(self.bound),
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class SuiteReport:
    """All check results of one suite run."""

    n: int
    trials: int
    seed: int
    results: List[CheckResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "all_passed": self.all_passed,
            "checks": [r.to_dict() for r in self.results],
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.to_dict() for r in self.results])


class PropertySuite:
    """
    Runs the randomized checks for one dimension.
    """

    def __init__(
        self,
        n: int,
        config: Optional[Dict] = None,
        trials: Optional[int] = None,
        seed: Optional[int] = None,
        extra: Optional[SymmetricUnitary] = None,
    ):
        """
        Initialize the suite.

        Args:
            n: Dimension
            config: Configuration dictionary (`verify`, `framework` sections)
            trials: Samples per property (overrides the configuration)
            seed: Seed of the sample stream (overrides the configuration)
            extra: Stored symmetric unitary added to every two-point sample set
        """
        config = config or {}
        verify_config = config.get("verify", {})
        framework_config = config.get("framework", {})

        if n < 1:
            raise InvariantViolationError("n positive", detail=f"got n={n}")
        if extra is not None and extra.n != n:
            raise DimensionMismatchError(f"Stored matrix has n={extra.n}, suite runs n={n}")

        self.n = n
        self.trials = trials if trials is not None else verify_config.get("trials", 200)
        self.seed = seed if seed is not None else verify_config.get("seed", 42)
        self.spectrum_samples = framework_config.get("spectrum_samples", 100)
        self.extra = extra
        self.rng = np.random.default_rng(self.seed)

        logger.info(f"Property suite initialized: n={n}, trials={self.trials}, seed={self.seed}")

    def _pairs(self) -> List[tuple]:
        pairs = [
            (random_lagrangian(self.n, self.rng), random_lagrangian(self.n, self.rng))
            for _ in range(self.trials)
        ]
        if self.extra is not None:
            other = random_lagrangian(self.n, self.rng)
            pairs += [(self.extra, other), (other, self.extra), (self.extra, self.extra)]
        return pairs

    def check_theta_closure(self) -> CheckResult:
        eye = np.eye(self.n)
        worst = 0.0
        for a, b in self._pairs():
            product = a.a @ b.a.conj() @ a.a
            worst = max(
                worst,
                frobenius_dist(product.conj().T @ product, eye),
                frobenius_dist(product @ product.conj(), eye),
            )
        return _bounded("theta_closure", worst, CLOSURE_TOL)

    def check_model_equivalence(self) -> CheckResult:
        worst = 0.0
        for a, b in self._pairs():
            via_unitary = unitary_to_involution(theta_unitary(a, b)).r
            via_involution = theta_involution(unitary_to_involution(a), unitary_to_involution(b)).r
            worst = max(worst, frobenius_dist(via_unitary, via_involution))
        return _bounded("model_equivalence", worst, CLOSURE_TOL)

    def check_first_slot_involution(self) -> CheckResult:
        worst = max((first_slot_involution_check(r0, s) for r0, s in self._pairs()), default=0.0)
        return _bounded("first_slot_involution", worst, CLOSURE_TOL)

    def check_round_trips(self) -> CheckResult:
        worst = 0.0
        for a, _ in self._pairs():
            r = unitary_to_involution(a)
            worst = max(worst, frobenius_dist(involution_to_unitary(r).a, a.a))

            plane = plane_from_involution(r)
            worst = max(worst, frobenius_dist(involution_from_plane(plane).r, r.r))
            # The plane is pointwise fixed by its own reflection
            worst = max(worst, float(np.linalg.norm(plane.frame @ r.r.T - plane.frame)))
        return _bounded("round_trips", worst, ROUND_TRIP_TOL)

    def check_gamma_equals_theta(self) -> CheckResult:
        worst = max(
            (frobenius_dist(gamma_product(a.a, b.a), theta_unitary(a, b).a) for a, b in self._pairs()),
            default=0.0,
        )
        return _bounded("gamma_equals_theta", worst, GAMMA_THETA_TOL)

    def check_framework_closure(self, group: Group, anti_iso: AntiIso) -> CheckResult:
        pairs = [
            (
                sample_fix(group, anti_iso, self.n, self.rng),
                sample_fix(group, anti_iso, self.n, self.rng),
            )
            for _ in range(self.trials)
        ]
        name = f"framework_closure_{anti_iso.value}_{group.value}"
        return _bounded(name, fix_closure_check(pairs), CLOSURE_TOL)

    def check_anti_iso_laws(self) -> CheckResult:
        worst = max(
            anti_iso_law_deviation(anti_iso, self.n, self.trials, self.rng) for anti_iso in AntiIso
        )
        return _bounded("anti_iso_laws", worst, ANTI_ISO_TOL)

    def check_su2_fix_points(self) -> CheckResult:
        worst = 0.0
        for _ in range(self.trials):
            g = su2_fix_point(random_unit_vector(self.rng))
            worst = max(
                worst,
                frobenius_dist(g.conj().T @ g, np.eye(2)),
                abs(np.linalg.det(g) - 1.0),
                frobenius_dist(g.T, g),
            )
        return _bounded("su2_fix_points", worst, SU2_TOL)

    def check_component_invariance(self) -> CheckResult:
        try:
            component_spectrum(self.n, self.trials, self.rng)
        except InvariantViolationError as e:
            return CheckResult("component_invariance", 1.0, 0.0, "==", False, str(e))
        return CheckResult("component_invariance", 0.0, 0.0, "==", True)

    def check_component_spectrum(self) -> CheckResult:
        distinct = len(set(component_spectrum(self.n, self.spectrum_samples, self.rng)))
        return CheckResult(
            "component_spectrum",
            float(distinct),
            float(MIN_DISTINCT_COMPONENTS),
            ">=",
            distinct >= MIN_DISTINCT_COMPONENTS,
        )

    def check_degree(self) -> List[CheckResult]:
        """Degree, sign paths and basepoint independence (odd n only)."""
        specs = [default_angles(self.n)] + [random_angles(self.n, self.rng) for _ in range(2)]
        results = []
        sums = []
        for index, spec in enumerate(specs):
            report = degree(spec, strict=False)
            sums.append(report.degree_signed_sum)
            if index == 0:
                mismatched = sum(p.sign_numeric != p.sign_analytic for p in report.points)
                results.append(
                    CheckResult(
                        "degree_closed_form",
                        float(report.degree_signed_sum),
                        float(report.degree_closed_form),
                        "==",
                        report.verified,
                    )
                )
                results.append(
                    CheckResult("sign_paths_agree", float(mismatched), 0.0, "==", mismatched == 0)
                )
                results.append(_bounded("preimage_residual", report.max_residual, 1e-11))
        spread = float(max(sums) - min(sums))
        results.append(CheckResult("basepoint_independence", spread, 0.0, "==", spread == 0.0))
        return results

    def run(self) -> SuiteReport:
        """
        Run every check.

        Returns:
            SuiteReport
        """
        report = SuiteReport(n=self.n, trials=self.trials, seed=self.seed)
        checks: List[Tuple[str, Callable[[], Any]]] = [
            ("theta_closure", self.check_theta_closure),
            ("model_equivalence", self.check_model_equivalence),
            ("first_slot_involution", self.check_first_slot_involution),
            ("round_trips", self.check_round_trips),
            ("gamma_equals_theta", self.check_gamma_equals_theta),
            (
                "framework_closure_transpose_U",
                partial(self.check_framework_closure, Group.U, AntiIso.TRANSPOSE),
            ),
            (
                "framework_closure_inverse_O",
                partial(self.check_framework_closure, Group.O, AntiIso.INVERSE),
            ),
            (
                "framework_closure_inverse_U",
                partial(self.check_framework_closure, Group.U, AntiIso.INVERSE),
            ),
            ("anti_iso_laws", self.check_anti_iso_laws),
            ("su2_fix_points", self.check_su2_fix_points),
            ("component_invariance", self.check_component_invariance),
            ("component_spectrum", self.check_component_spectrum),
        ]
        if self.n % 2 == 1:
            checks.append(("degree", self.check_degree))

        for name, check in checks:
            try:
                outcome = check()
            except LagrangianGammaError as e:
                logger.error(f"Check {name} raised: {e}")
                outcome = CheckResult(name, 1.0, 0.0, "==", False, str(e))
            report.results.extend(outcome if isinstance(outcome, list) else [outcome])

        failed = [r.name for r in report.results if not r.passed]
        if failed:
            logger.warning(f"Property suite n={self.n}: failed {failed}")
        else:
            logger.info(f"Property suite n={self.n}: all {len(report.results)} checks passed")
        return report


def _bounded(name: str, value: float, bound: float) -> CheckResult:
    return CheckResult(name, float(value), bound, "<=", bool(value <= bound))

