from typing import List

from app.config import settings
from app.models.simulation import IdentityReport
from app.sphere.verification import run_identity_suite
from app.utils.log import get_logger

logger = get_logger(__name__)


class VerificationService:
    """Runs the identity suite and formats its reports"""

    def __init__(self, trials: int = settings.VERIFY_TRIALS):
        self.trials = trials

    def verify(self, L: int, a: float, seed: int) -> List[IdentityReport]:
        logger.info("identity suite: L=%d a=%g seed=%d trials=%d", L, a, seed, self.trials)
        reports = run_identity_suite(L, a, seed, trials=self.trials)
        for report in reports:
            if not report.passed:
                logger.warning("identity '%s' failed: %.3e > %.1e", report.name, report.max_error, report.tolerance)
        return reports

    @staticmethod
    def all_passed(reports: List[IdentityReport]) -> bool:
        return all(report.passed for report in reports)

    @staticmethod
    def render_table(reports: List[IdentityReport]) -> str:
        width = max(len("identity"), *(len(report.name) for report in reports))
        lines = [f"{'identity':<{width}}  {'max_error':>10}  {'tolerance':>9}  {'trials':>6}  result"]
        for report in reports:
            lines.append(
                f"{report.name:<{width}}  {report.max_error:>10.3e}  {report.tolerance:>9.1e}  "
                f"{report.trials:>6d}  {'pass' if report.passed else 'FAIL'}"
            )
        return "\n".join(lines)
