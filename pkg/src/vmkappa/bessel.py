"""Modified Bessel machinery for circular concentration estimation.

Provides exponentially scaled I0/I1, the mean-resultant ratio
A(kappa) = I1(kappa)/I0(kappa), its derivative, and the inverse of A.
All routines stay finite for kappa up to KAPPA_CAP; nothing here ever
evaluates an unscaled Bessel function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import i0e, i1e

# Hard ceiling on any concentration value the library will report.  Solvers
# asked to go beyond it raise UnboundedError instead.
KAPPA_CAP = 1e10


class UnboundedError(ArithmeticError):
    """The requested concentration is beyond KAPPA_CAP (effectively infinite)."""


@dataclass(frozen=True)
class ScaledBessel:
    """Exponentially scaled Bessel values at a single concentration.

    i0e = e^-kappa I0(kappa), i1e = e^-kappa I1(kappa), ratio = I1/I0.
    """

    i0e: float
    i1e: float
    ratio: float


def _check_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not math.isfinite(kappa) or kappa < 0.0:
        raise ValueError(f"kappa must be finite and >= 0, got {kappa!r}")
    return kappa


def bessel_scaled(kappa: float) -> ScaledBessel:
    """Scaled I0, I1 and their ratio at ``kappa``.

    Relative accuracy is at the level of the underlying Cephes routines
    (~1e-15) for kappa anywhere in [0, KAPPA_CAP]; no overflow is possible.
    """
    kappa = _check_kappa(kappa)
    v0 = float(i0e(kappa))
    v1 = float(i1e(kappa))
    return ScaledBessel(i0e=v0, i1e=v1, ratio=v1 / v0)


def bessel_ratio(kappa):
    """A(kappa) = I1/I0 for scalar or ndarray input (no validation)."""
    return i1e(kappa) / i0e(kappa)


def log_i0(kappa):
    """ln I0(kappa) without overflow, scalar or ndarray."""
    return kappa + np.log(i0e(kappa))


# Taylor coefficients at 0 (A'(k) = 1/2 - 3k^2/16 + 5k^4/96 - 77k^6/6144
# + 57k^8/20480 + ...) and the large-argument expansion
# A'(k) = 1/(2k^2) + 1/(4k^3) + 3/(8k^4) + 25/(32k^5) + ...
# The identity A' = 1 - A/k - A^2 is only used in the middle range: it is
# 0/0 at zero and loses ~2 k^2 eps of relative accuracy as k grows.
_APRIME_SMALL = 0.1
_APRIME_LARGE = 1e3


def _a_prime_raw(kappa):
    k = np.asarray(kappa, dtype=float)
    scalar = k.ndim == 0
    k = np.atleast_1d(k)
    out = np.empty_like(k)

    small = k < _APRIME_SMALL
    large = k >= _APRIME_LARGE
    mid = ~(small | large)

    ks = k[small]
    k2 = ks * ks
    out[small] = 0.5 + k2 * (
        -3.0 / 16.0 + k2 * (5.0 / 96.0 + k2 * (-77.0 / 6144.0 + k2 * (57.0 / 20480.0)))
    )

    km = k[mid]
    a = i1e(km) / i0e(km)
    out[mid] = 1.0 - a / km - a * a

    kl = k[large]
    out[large] = (0.5 + (0.25 + (0.375 + 25.0 / 32.0 / kl) / kl) / kl) / (kl * kl)

    return float(out[0]) if scalar else out


def a_prime(kappa: float) -> float:
    """Derivative of A(kappa); lies in (0, 1/2] with A'(0) = 1/2."""
    return _a_prime_raw(_check_kappa(kappa))


def _a_prime_s(k: float) -> float:
    # scalar fast path of _a_prime_raw (hot inside 1-d optimizers)
    if k < _APRIME_SMALL:
        k2 = k * k
        return 0.5 + k2 * (
            -3.0 / 16.0 + k2 * (5.0 / 96.0 + k2 * (-77.0 / 6144.0 + k2 * (57.0 / 20480.0)))
        )
    if k >= _APRIME_LARGE:
        return (0.5 + (0.25 + (0.375 + 25.0 / 32.0 / k) / k) / k) / (k * k)
    a = float(i1e(k)) / float(i0e(k))
    return 1.0 - a / k - a * a


def _a_second_s(k: float) -> float:
    """Second derivative of A at a scalar kappa, branch structure as A'."""
    if k < _APRIME_SMALL:
        k2 = k * k
        return k * (
            -3.0 / 8.0 + k2 * (5.0 / 24.0 + k2 * (-77.0 / 1024.0 + k2 * (57.0 / 2560.0)))
        )
    if k >= _APRIME_LARGE:
        return -(1.0 + (0.75 + 1.5 / k) / k) / (k * k * k)
    a = float(i1e(k)) / float(i0e(k))
    ap = 1.0 - a / k - a * a
    return -ap / k + a / (k * k) - 2.0 * a * ap


def ratio_over_kappa(kappa):
    """A(kappa)/kappa, finite at 0 where the limit is 1/2.

    Accepts scalars or arrays; below 1e-6 the two-term Taylor polynomial is
    exact to double precision.
    """
    k = np.asarray(kappa, dtype=float)
    scalar = k.ndim == 0
    k = np.atleast_1d(k)
    out = np.empty_like(k)
    small = k < 1e-6
    ks = k[small]
    out[small] = 0.5 - ks * ks / 16.0
    kb = k[~small]
    out[~small] = (i1e(kb) / i0e(kb)) / kb
    return float(out[0]) if scalar else out


# Largest resultant length with a representable solution under the cap.
_A_AT_CAP = float(i1e(KAPPA_CAP) / i0e(KAPPA_CAP))


def a_inverse(rbar: float) -> float:
    """Solve A(kappa) = rbar for kappa >= 0.

    The returned kappa satisfies |A(kappa) - rbar| <= 1e-12 (usually far
    better: the Newton iteration is run to machine residual).

    Raises
    ------
    ValueError
        If rbar is negative or not finite.
    UnboundedError
        If rbar >= 1 (no finite solution) or the solution exceeds KAPPA_CAP.
    """
    rbar = float(rbar)
    if not math.isfinite(rbar) or rbar < 0.0:
        raise ValueError(f"rbar must be finite and >= 0, got {rbar!r}")
    if rbar >= 1.0:
        raise UnboundedError("A(kappa) < 1 for every finite kappa; no solution")
    if rbar == 0.0:
        return 0.0
    if rbar > _A_AT_CAP:
        raise UnboundedError(f"solution of A(kappa) = {rbar!r} exceeds KAPPA_CAP")

    # Classical piecewise starting value, then safeguarded Newton.
    if rbar < 0.53:
        k = 2.0 * rbar + rbar**3 + 5.0 * rbar**5 / 6.0
    elif rbar < 0.85:
        k = -0.4 + 1.39 * rbar + 0.43 / (1.0 - rbar)
    else:
        k = 1.0 / (rbar**3 - 4.0 * rbar**2 + 3.0 * rbar)
    k = min(max(k, 1e-300), KAPPA_CAP)

    lo, hi = 0.0, KAPPA_CAP  # A(lo) - rbar < 0 <= A(hi) - rbar
    for _ in range(200):
        resid = float(i1e(k) / i0e(k)) - rbar
        if resid < 0.0:
            lo = k
        else:
            hi = k
        if abs(resid) <= 1e-15:
            break
        step = resid / _a_prime_raw(k)
        k_next = k - step
        if not lo < k_next < hi:
            k_next = 0.5 * (lo + hi)
        if abs(k_next - k) <= 1e-16 * max(1.0, k):
            k = k_next
            break
        k = k_next
    return k
