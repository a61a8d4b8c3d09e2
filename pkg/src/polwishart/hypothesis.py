"""Two-sample tests from stochastic distances with an asymptotic chi-square law.

Under H0 (both samples from the same W_R law) the statistic

    S = 2 N1 N2 / (N1 + N2) * d(theta1_hat, theta2_hat) / (h'(0) phi''(1))

converges to a chi-square variable whose degrees of freedom equal the number
of fitted parameters.
"""

from dataclasses import asdict, dataclass
import enum

from .distances import Case, Kind, Measure, distance, resolve_case
from .errors import DimensionMismatch, DomainError, UnsupportedKind
from .special import chi2_sf
from .wishart import fit


class DfMode(enum.Enum):
    FULL = "full"  # p^2 covariance parameters plus the number of looks
    SIGMA_ONLY = "sigma-only"

    @classmethod
    def parse(cls, text):
        return text if isinstance(text, cls) else cls(str(text).strip().lower().replace("_", "-"))

    def df(self, p):
        return p * p + 1 if self is DfMode.FULL else p * p


def normalizer(kind, beta=None):
    """h'(0) * phi''(1) for the (h, phi) pair behind each distance."""
    if isinstance(kind, Measure):
        kind, beta = kind.kind, kind.beta
    kind = kind if isinstance(kind, Kind) else Kind.parse(kind)
    if kind is Kind.KL:
        return 1.0
    if kind is Kind.RENYI:
        return Measure(kind, beta).beta
    if kind in (Kind.BHATTACHARYYA, Kind.HELLINGER):
        return 0.25
    raise UnsupportedKind(f"{kind.value} distance has no (h, phi) normalizer; it cannot drive a test")


def test_statistic(d, N1, N2, kind, beta=None):
    if d < 0:
        raise DomainError(f"distance must be non-negative, got {d}")
    if N1 < 1 or N2 < 1:
        raise DomainError(f"sample sizes must be positive, got {N1}, {N2}")
    return 2.0 * N1 * N2 / (N1 + N2) * d / normalizer(kind, beta)


test_statistic.__test__ = False  # keep pytest from collecting it


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: int
    p_value: float
    reject: bool
    nominal_level: float
    measure: Measure
    case: Case = Case.AUTO

    __test__ = False  # not a pytest class

    def to_dict(self):
        out = asdict(self)
        out["measure"] = self.measure.label
        out["beta"] = self.measure.beta
        out["case"] = self.case.value
        return out


def _check_level(level):
    if not 0.0 < level < 1.0:
        raise DomainError(f"nominal level must lie in (0, 1), got {level}")


def test_from_params(t1, t2, N1, N2, measure, level=0.05, df_mode=DfMode.FULL):
    """Test decision from already fitted parameters and their sample sizes."""
    _check_level(level)
    if not isinstance(measure, Measure):
        measure = Measure.parse(measure)
    normalizer(measure)
    case = resolve_case(t1, t2, Case.AUTO)
    d = distance(measure, t1, t2, case)
    s = test_statistic(d, N1, N2, measure.kind, measure.beta)
    df = DfMode.parse(df_mode).df(t1.p)
    pv = chi2_sf(s, df)
    return TestResult(s, df, pv, pv <= level, level, measure, case)


test_from_params.__test__ = False


def two_sample_test(s1, s2, measure, level=0.05, df_mode=DfMode.FULL):
    """Fit W_R to each sample by ML and test H0: theta1 == theta2.

    The number of looks is estimated separately for each sample.
    """
    if s1.p != s2.p:
        raise DimensionMismatch(f"dimension {s1.p} != {s2.p}")
    return test_from_params(fit(s1), fit(s2), s1.N, s2.N, measure, level, df_mode)
