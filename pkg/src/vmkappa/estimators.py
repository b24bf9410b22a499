"""The twelve concentration estimators.

Every estimator maps a sample of angles to a nonnegative concentration value
or to a typed failure (Undefined / NoSolution / Unbounded).  Identifiers are
fixed strings and serialize exactly as spelled in ESTIMATOR_IDS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from time import perf_counter

import numpy as np
from scipy.special import i0e

from .bessel import (
    KAPPA_CAP,
    UnboundedError,
    _a_prime_raw,
    _a_prime_s,
    _a_second_s,
    a_inverse,
    bessel_ratio,
    ratio_over_kappa,
)
from . import _kernels
from .descriptive import circular_median, resultant_to_polar, summarize
from .quadrature import adaptive_quad

ESTIMATOR_IDS = (
    "jML",
    "mML",
    "BF1",
    "BF2",
    "median-1",
    "median-2",
    "linear",
    "BayesEst-2-jMAP-km",
    "BayesEst-3-jMAP-km",
    "BayesEst-3-jMAP-xy",
    "MML-2",
    "MML-3",
)

PRIOR_IDS = ("h2", "h3")

UNDEFINED = "Undefined"
NO_SOLUTION = "NoSolution"
UNBOUNDED = "Unbounded"
FAILURE_TAGS = (UNDEFINED, NO_SOLUTION, UNBOUNDED)

# Scale constant of the median-deviation estimator.
MEDIAN1_SCALE = 0.6724

_LOG_TWO_PI = math.log(2.0 * math.pi)
_LOG_2_OVER_PI = math.log(2.0 / math.pi)


@dataclass(frozen=True)
class EstimateOutcome:
    """Result of one estimator run: a value or a failure tag, plus timing."""

    estimator: str
    value: float | None
    failure: str | None
    seconds: float = 0.0

    def __post_init__(self):
        if (self.value is None) == (self.failure is None):
            raise ValueError("exactly one of value/failure must be set")
        if self.failure is not None and self.failure not in FAILURE_TAGS:
            raise ValueError(f"unknown failure tag {self.failure!r}")
        if self.value is not None and not (0.0 <= self.value <= KAPPA_CAP):
            raise ValueError(f"value out of range: {self.value!r}")

    @property
    def failed(self) -> bool:
        return self.failure is not None


def _ok(estimator: str, value: float) -> EstimateOutcome:
    return EstimateOutcome(estimator, float(value), None)

def _fail(estimator: str, tag: str) -> EstimateOutcome:
    return EstimateOutcome(estimator, None, tag)

def _finish(estimator: str, value: float) -> EstimateOutcome:
    # uniform cap policy: values beyond KAPPA_CAP are reported as unbounded
    if value > KAPPA_CAP:
        return _fail(estimator, UNBOUNDED)
    return _ok(estimator, max(value, 0.0))


# ---------------------------------------------------------------------------
# Likelihood-based estimators
# ---------------------------------------------------------------------------

def estimate_jml(sample) -> EstimateOutcome:
    """Joint maximum likelihood: A(kappa) = rbar."""
    s = summarize(sample)
    if s.rbar >= 1.0:
        return _fail("jML", UNBOUNDED)
    if s.rbar == 0.0:
        return _ok("jML", 0.0)
    try:
        return _ok("jML", a_inverse(s.rbar))
    except UnboundedError:
        return _fail("jML", UNBOUNDED)


def _marginal_root(n: int, rbar: float) -> float:
    """Positive root of A(k) - rbar * A(n * rbar * k), assuming rbar > 1/sqrt(n)."""

    def g(k: float) -> float:
        return float(bessel_ratio(k)) - rbar * float(bessel_ratio(n * rbar * k))

    lo = 1e-8
    if g(lo) >= 0.0:
        # the root sits below resolution; continuous with the zero branch
        return 0.0
    hi = 1.0
    while g(hi) <= 0.0:
        hi *= 4.0
        if hi >= KAPPA_CAP:
            if g(KAPPA_CAP) <= 0.0:
                raise UnboundedError("marginal likelihood equation has no root under the cap")
            hi = KAPPA_CAP
            break
    lo = max(lo, hi / 4.0 if hi > 1.0 else lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, mid):
            break
    return 0.5 * (lo + hi)


def estimate_mml_marginal(sample) -> EstimateOutcome:
    """Marginal maximum likelihood with the closed zero region rbar <= 1/sqrt(n)."""
    s = summarize(sample)
    if s.rbar >= 1.0:
        return _fail("mML", UNBOUNDED)
    if s.rbar <= 1.0 / math.sqrt(s.n):
        return _ok("mML", 0.0)
    try:
        return _finish("mML", _marginal_root(s.n, s.rbar))
    except UnboundedError:
        return _fail("mML", UNBOUNDED)


def estimate_bf1(sample) -> EstimateOutcome:
    """First-order bias correction of the joint ML estimate."""
    base = estimate_jml(sample)
    n = len(sample)
    if base.failed:
        return _fail("BF1", base.failure)
    kh = base.value
    if kh < 2.0:
        corrected = kh - 2.0 / (n * kh) if kh > 0.0 else 0.0
        return _ok("BF1", max(corrected, 0.0))
    return _finish("BF1", (n - 1.0) ** 3 / (n**3 + n) * kh)


def estimate_bf2(sample) -> EstimateOutcome:
    """Jackknife bias correction of the joint ML estimate.

    Leave-one-out estimates are formed from the retained trigonometric sums,
    so the whole correction is O(n).  A leave-one-out subsample with unit
    resultant makes the jackknife sum infinite; the outer max then clamps
    the estimate to 0 (the full-sample estimate itself must still be finite,
    otherwise the outcome is unbounded).
    """
    x = np.asarray(sample, dtype=float)
    s = summarize(x)
    n = s.n
    if s.rbar >= 1.0:
        return _fail("BF2", UNBOUNDED)
    try:
        kh = a_inverse(s.rbar)
    except UnboundedError:
        return _fail("BF2", UNBOUNDED)

    cos_x = np.cos(x)
    sin_x = np.sin(x)
    loo_sum = 0.0
    for i in range(n):
        rbar_i, _, _ = resultant_to_polar(s.sum_cos - cos_x[i], s.sum_sin - sin_x[i], n - 1)
        try:
            loo_sum += a_inverse(rbar_i)
        except UnboundedError:
            return _ok("BF2", 0.0)
    raw = n * kh - (n - 1.0) / n * loo_sum
    return _finish("BF2", max(raw, 0.0))


# ---------------------------------------------------------------------------
# Median-based estimators
# ---------------------------------------------------------------------------

def estimate_median1(sample) -> EstimateOutcome:
    """Scaled inverse median of 2[1 - cos(x - median direction)]."""
    x = np.asarray(sample, dtype=float)
    med_dir = circular_median(x)
    denom = float(np.median(2.0 * (1.0 - np.cos(x - med_dir))))
    if denom == 0.0:
        return _fail("median-1", UNBOUNDED)
    return _finish("median-1", MEDIAN1_SCALE / denom)


def _cosine_cdf(kappa: float, c: float) -> float:
    """P(cos(x - mu) <= c) under concentration kappa.

    Written as an integral over theta = arccos(t) so the endpoint
    singularity of the density of the cosine disappears; the integrand is
    then exp(kappa (cos theta - 1)) / (pi i0e(kappa)) on [arccos c, pi].
    The exponent is evaluated as -2 kappa sin^2(theta/2) (no 1 - cos
    cancellation) and the interval is truncated where the exponential
    underflows, which also keeps the quadrature nodes inside the narrow
    live region at very large kappa.
    """
    theta0 = math.acos(min(1.0, max(-1.0, c)))
    if kappa == 0.0:
        return (math.pi - theta0) / math.pi
    cos_cut = math.cos(theta0) - 745.0 / kappa
    theta1 = math.pi if cos_cut <= -1.0 else math.acos(cos_cut)
    scale = 1.0 / (math.pi * float(i0e(kappa)))

    def integrand(th):
        s = np.sin(0.5 * th)
        return scale * np.exp(-2.0 * kappa * s * s)

    with np.errstate(under="ignore"):
        return adaptive_quad(integrand, theta0, theta1, eps_abs=1e-11)


def _solve_median_cdf(c: float) -> float:
    """kappa >= 0 with P_kappa(cos <= c) = 1/2; the CDF decreases in kappa."""
    hi = 1.0
    while _cosine_cdf(hi, c) > 0.5:
        hi *= 4.0
        if hi > KAPPA_CAP:
            raise UnboundedError("median cosine too close to 1; no root under the cap")
    lo = hi / 4.0 if hi > 1.0 else 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g = _cosine_cdf(mid, c)
        if abs(g - 0.5) <= 1e-10:
            return mid
        if g > 0.5:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, mid):
            break
    return 0.5 * (lo + hi)


def estimate_median2(sample) -> EstimateOutcome:
    """Match the sample median cosine deviation to its population median.

    With c the median of cos(x - circular median), solves
    P_kappa(cos <= c) = 1/2.  For c < 0 no kappa >= 0 attains 1/2 and the
    outcome is NoSolution; c = 0 is solved exactly by kappa = 0.
    """
    x = np.asarray(sample, dtype=float)
    mu_sb = circular_median(x)
    c = float(np.median(np.cos(x - mu_sb)))
    if c < 0.0:
        return _fail("median-2", NO_SOLUTION)
    if c == 0.0:
        return _ok("median-2", 0.0)
    try:
        return _finish("median-2", _solve_median_cdf(c))
    except UnboundedError:
        return _fail("median-2", UNBOUNDED)


# ---------------------------------------------------------------------------
# Normal-approximation (linear) estimator
# ---------------------------------------------------------------------------

_INV_TWO_PI = 1.0 / (2.0 * math.pi)


def estimate_linear(sample) -> EstimateOutcome:
    """Inverse unbiased variance of deviations, defined for n > 3 only.

    Deviations are taken around the mean direction and wrapped into
    (-pi, pi], which moves the circle's seam opposite the bulk of the mass.
    The fused kernels keep the per-call cost essentially flat in n; without
    numba an equivalent numpy pipeline is used.
    """
    x = np.ascontiguousarray(sample, dtype=float)
    n = x.size
    if n <= 3:
        return _fail("linear", UNDEFINED)
    if _kernels.HAVE_NUMBA:
        sum_cos, sum_sin = _kernels.resultant_sums(x)
        rbar, mean_dir, _ = resultant_to_polar(sum_cos, sum_sin, n)
        total, total_sq = _kernels.wrapped_deviation_moments(x, mean_dir)
    else:
        rbar, mean_dir, _ = resultant_to_polar(
            float(np.cos(x).sum()), float(np.sin(x).sum()), n
        )
        d = x - mean_dir
        d -= (2.0 * math.pi) * np.rint(d * _INV_TWO_PI)
        d[d <= -math.pi] += 2.0 * math.pi
        total = float(d.sum())
        total_sq = float(d @ d)
    var = (total_sq - total * total / n) / (n - 3)
    if var <= 0.0:
        return _fail("linear", UNBOUNDED)
    return _finish("linear", 1.0 / var)


# ---------------------------------------------------------------------------
# Posterior-maximization estimators
# ---------------------------------------------------------------------------

# Positive search grid for the one-dimensional objectives; the zero boundary
# is always compared separately.
_SEARCH_GRID = np.geomspace(1e-8, KAPPA_CAP, 128)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max_log(obj, lo: float, hi: float, tol: float = 1e-10) -> tuple[float, float]:
    """Golden-section maximization of obj(e^t) for t in [ln lo, ln hi]."""

    def f(t: float) -> float:
        return float(obj(np.array([math.exp(t)]))[0])

    a, b = math.log(lo), math.log(hi)
    h = b - a
    c = b - _GOLDEN * h
    d = a + _GOLDEN * h
    fc, fd = f(c), f(d)
    while h > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = b - _GOLDEN * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _GOLDEN * h
            fd = f(d)
    t = 0.5 * (a + b)
    return math.exp(t), f(t)


def _maximize_kappa(obj, value_at_zero: float, dobj=None) -> float:
    """Global maximizer over [0, KAPPA_CAP] of a smooth objective.

    A coarse log-grid scan brackets the interior optimum.  When the analytic
    derivative ``dobj`` is available and changes sign across the bracket,
    the maximizer is pinned by bisecting that sign (the objective itself is
    too flat near its maximum to compare in double precision); otherwise
    golden-section refinement on the objective is used.  The refined value
    is compared against the zero boundary.  Raises UnboundedError when the
    maximizer sits at the cap.
    """
    with np.errstate(under="ignore"):
        vals = obj(_SEARCH_GRID)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    i = int(np.argmax(vals))
    lo = _SEARCH_GRID[max(i - 1, 0)]
    hi = _SEARCH_GRID[min(i + 1, len(_SEARCH_GRID) - 1)]

    k_star = None
    if dobj is not None and dobj(lo) > 0.0 > dobj(hi):
        a, b = lo, hi
        for _ in range(100):
            mid = math.sqrt(a * b)
            if dobj(mid) > 0.0:
                a = mid
            else:
                b = mid
            if b - a <= 1e-14 * b:
                break
        k_star = 0.5 * (a + b)
        v_star = float(obj(np.array([k_star]))[0])
    if k_star is None:
        k_star, v_star = _golden_max_log(obj, lo, hi)
        if vals[i] > v_star:
            k_star, v_star = float(_SEARCH_GRID[i]), float(vals[i])
    # prefer the zero boundary when the interior advantage is below the
    # objective's floating-point resolution (strictly decreasing objectives
    # must yield exactly 0, not a grid-floor artifact)
    if math.isfinite(value_at_zero) and value_at_zero >= v_star - 1e-12 * max(
        1.0, abs(value_at_zero)
    ):
        return 0.0
    if k_star >= KAPPA_CAP * (1.0 - 1e-9):
        raise UnboundedError("posterior objective still rising at KAPPA_CAP")
    return k_star


def _log_likelihood_profile(n: int, rbar: float):
    """ln L(mean direction, kappa) as a function of kappa, Bessel-scaled."""

    def ll(k):
        return -n * (_LOG_TWO_PI + np.log(i0e(k)) + k * (1.0 - rbar))

    return ll


def _check_prior(prior: str) -> None:
    if prior not in PRIOR_IDS:
        raise ValueError(f"prior must be one of {PRIOR_IDS}, got {prior!r}")


def estimate_map(sample, prior: str) -> EstimateOutcome:
    """MAP of (kappa, mu) under prior h2 or h3, mu profiled at the mean direction."""
    _check_prior(prior)
    estimator = "BayesEst-2-jMAP-km" if prior == "h2" else "BayesEst-3-jMAP-km"
    s = summarize(sample)
    ll = _log_likelihood_profile(s.n, s.rbar)

    n, rbar = s.n, s.rbar
    if prior == "h2":
        def obj(k):
            return _LOG_2_OVER_PI - np.log1p(k * k) + ll(k)

        def dobj(k):
            return -2.0 * k / (1.0 + k * k) + n * (rbar - float(bessel_ratio(k)))

        value_at_zero = float(obj(np.zeros(1))[0])
    else:
        def obj(k):
            return np.log(k) - 1.5 * np.log1p(k * k) + ll(k)

        def dobj(k):
            return 1.0 / k - 3.0 * k / (1.0 + k * k) + n * (rbar - float(bessel_ratio(k)))

        value_at_zero = -math.inf  # h3 vanishes at zero
    try:
        return _finish(estimator, _maximize_kappa(obj, value_at_zero, dobj))
    except UnboundedError:
        return _fail(estimator, UNBOUNDED)


def estimate_map_xy(sample, single_normalizer: bool = False) -> EstimateOutcome:
    """MAP in Cartesian parameters (kappa cos mu, kappa sin mu), prior h3.

    The Jacobian cancels the kappa factor of h3, so the prior term is
    (1 + kappa^2)^(-3/2) and the objective stays finite at zero.  With
    ``single_normalizer`` the Bessel log-normalizer is counted once instead
    of per observation (comparison variant; not used by the dispatch table).
    """
    s = summarize(sample)
    n, rbar = s.n, s.rbar
    if single_normalizer:
        def obj(k):
            return -1.5 * np.log1p(k * k) - (_LOG_TWO_PI + np.log(i0e(k)) + k) + n * rbar * k

        def dobj(k):
            return -3.0 * k / (1.0 + k * k) + n * rbar - float(bessel_ratio(k))
    else:
        ll = _log_likelihood_profile(n, rbar)

        def obj(k):
            return -1.5 * np.log1p(k * k) + ll(k)

        def dobj(k):
            return -3.0 * k / (1.0 + k * k) + n * (rbar - float(bessel_ratio(k)))

    value_at_zero = float(obj(np.zeros(1))[0])
    try:
        return _finish("BayesEst-3-jMAP-xy", _maximize_kappa(obj, value_at_zero, dobj))
    except UnboundedError:
        return _fail("BayesEst-3-jMAP-xy", UNBOUNDED)


def estimate_mml(sample, prior: str) -> EstimateOutcome:
    """Minimum-message-length estimators (posterior over root Fisher determinant).

    For h2 the penalty is -1/2 ln{[kappa A + 3/(n pi^2)] A'}; for h3 it is
    -ln n - 1/2 ln(kappa A A'), combined with ln h3 into a form finite at
    kappa -> 0 (h3 ~ kappa cancels the sqrt(kappa A) ~ kappa/sqrt(2) factor).
    """
    _check_prior(prior)
    estimator = "MML-2" if prior == "h2" else "MML-3"
    s = summarize(sample)
    n = s.n
    ll = _log_likelihood_profile(n, s.rbar)

    rbar = s.rbar
    if prior == "h2":
        floor = 3.0 / (n * math.pi**2)

        def obj(k):
            a = bessel_ratio(k)
            return (
                _LOG_2_OVER_PI
                - np.log1p(k * k)
                + ll(k)
                - 0.5 * np.log(k * a + floor)
                - 0.5 * np.log(_a_prime_raw(k))
            )

        def dobj(k):
            a = float(bessel_ratio(k))
            ap = _a_prime_s(k)
            return (
                -2.0 * k / (1.0 + k * k)
                + n * (rbar - a)
                - 0.5 * (a + k * ap) / (k * a + floor)
                - 0.5 * _a_second_s(k) / ap
            )
    else:
        def obj(k):
            return (
                -1.5 * np.log1p(k * k)
                - 0.5 * np.log(ratio_over_kappa(k))
                - 0.5 * np.log(_a_prime_raw(k))
                + ll(k)
                - math.log(n)
            )

        def dobj(k):
            a = float(bessel_ratio(k))
            ap = _a_prime_s(k)
            return (
                1.0 / k
                - 3.0 * k / (1.0 + k * k)
                + n * (rbar - a)
                - 0.5 * (1.0 / k + ap / a + _a_second_s(k) / ap)
            )

    value_at_zero = float(obj(np.zeros(1))[0])
    try:
        return _finish(estimator, _maximize_kappa(obj, value_at_zero, dobj))
    except UnboundedError:
        return _fail(estimator, UNBOUNDED)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def _map_h2(sample):
    return estimate_map(sample, "h2")

def _map_h3(sample):
    return estimate_map(sample, "h3")

def _mml_h2(sample):
    return estimate_mml(sample, "h2")

def _mml_h3(sample):
    return estimate_mml(sample, "h3")


_DISPATCH = {
    "jML": estimate_jml,
    "mML": estimate_mml_marginal,
    "BF1": estimate_bf1,
    "BF2": estimate_bf2,
    "median-1": estimate_median1,
    "median-2": estimate_median2,
    "linear": estimate_linear,
    "BayesEst-2-jMAP-km": _map_h2,
    "BayesEst-3-jMAP-km": _map_h3,
    "BayesEst-3-jMAP-xy": estimate_map_xy,
    "MML-2": _mml_h2,
    "MML-3": _mml_h3,
}


def run_estimator(estimator_id: str, sample) -> EstimateOutcome:
    """Dispatch to one estimator and record its wall-clock duration."""
    try:
        fn = _DISPATCH[estimator_id]
    except KeyError:
        raise ValueError(
            f"unknown estimator {estimator_id!r}; valid ids: {', '.join(ESTIMATOR_IDS)}"
        ) from None
    t0 = perf_counter()
    outcome = fn(sample)
    return replace(outcome, seconds=perf_counter() - t0)
