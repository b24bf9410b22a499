"""Independent reference machinery shared by the tests.

Everything here is deliberately written from scratch against the defining
formulas (scipy quadrature, ``ive``-based Bessel ratios, dense grid search)
so that it exercises different code paths than the package implementation.
Frozen constants were computed offline with 50-digit mpmath quadrature of
the defining integrals.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.integrate
from scipy.special import ive

# A(kappa) = I1/I0 from 50-digit quadrature of the defining integrals.
A_REF = {
    0.5: 0.242499612580801945350702353504,
    1.0: 0.446389965896534507047681795193,
    2.0: 0.697774657964007982006790592552,
    10.0: 0.948599825954845958971301857835,
    100.0: 0.994987373005168765587364606216,
}

# Second trigonometric moment I2/I0 at the sampler-test concentrations.
I2_OVER_I0_REF = {
    0.5: 0.0300015496767922185971905859855,
    2.0: 0.302225342035992017993209407448,
    10.0: 0.810280034809030808205739628433,
}

# d/dkappa of I1/I0, high-precision differentiation.
APRIME_REF = {
    2.0: 0.164223197721207681087192359574,
    100.0: 5.02538302214703572502147363268e-05,
}

# Root of P_kappa(cos <= 0.5) = 1/2 (bisection against mpmath quadrature).
MEDIAN2_ROOT_C_HALF = 0.5879158351928893110010088

# Positive root of A(k) = 0.7 * A(10 * 0.7 * k) (bisection, mpmath).
MARGINAL_ROOT_N10_R07 = 1.855092130760945171952102


def quad_ratio(kappa: float) -> float:
    """A(kappa) by adaptive quadrature of the defining integrals (kappa <= 20)."""
    num = scipy.integrate.quad(
        lambda x: math.cos(x) * math.exp(kappa * math.cos(x)), 0.0, math.pi,
        epsabs=1e-13, epsrel=1e-12, limit=200,
    )[0]
    den = scipy.integrate.quad(
        lambda x: math.exp(kappa * math.cos(x)), 0.0, math.pi,
        epsabs=1e-13, epsrel=1e-12, limit=200,
    )[0]
    return num / den


def quad_i0(kappa: float) -> float:
    """I0(kappa) by quadrature, unscaled (safe for kappa <= 20)."""
    return scipy.integrate.quad(
        lambda x: math.exp(kappa * math.cos(x)), 0.0, math.pi,
        epsabs=1e-13, epsrel=1e-12, limit=200,
    )[0] / math.pi


def ensure_zero_proxy(kappa: np.ndarray) -> np.ndarray:
    """Replace exact zeros with a tiny positive proxy evaluable by all objectives."""
    return np.where(kappa == 0.0, 1e-150, kappa)


def _a(k: np.ndarray) -> np.ndarray:
    return ive(1, k) / ive(0, k)


def _a_prime(k: np.ndarray) -> np.ndarray:
    # identity below 1e3; three-term large-argument expansion above, where
    # the identity loses to cancellation
    a = _a(k)
    with np.errstate(over="ignore"):
        ident = 1.0 - a / k - a * a
        asym = (0.5 + (0.25 + 0.375 / k) / k) / (k * k)
    return np.where(k < 1e3, ident, asym)


def _log_lik(k: np.ndarray, n: int, rbar: float) -> np.ndarray:
    # ln L(m, kappa) = -n ln(2 pi I0) + n rbar kappa, with ln I0 = k + ln ive0
    return -n * (math.log(2 * math.pi) + k + np.log(ive(0, k))) + n * rbar * k


def objective_grid(estimator: str, n: int, rbar: float, kappas: np.ndarray) -> np.ndarray:
    """Posterior/MML objective values, independently transcribed."""
    k = ensure_zero_proxy(np.asarray(kappas, dtype=float))
    ll = _log_lik(k, n, rbar)
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        if estimator == "BayesEst-2-jMAP-km":
            prior = np.log(2.0 / (math.pi * (1.0 + k * k)))
            return prior + ll
        if estimator == "BayesEst-3-jMAP-km":
            prior = np.log(k) - 1.5 * np.log(1.0 + k * k)
            return prior + ll
        if estimator == "BayesEst-3-jMAP-xy":
            prior = -1.5 * np.log(1.0 + k * k)
            return prior + ll
        if estimator == "MML-2":
            prior = np.log(2.0 / (math.pi * (1.0 + k * k)))
            fisher = (k * _a(k) + 3.0 / (n * math.pi**2)) * _a_prime(k)
            return prior + ll - 0.5 * np.log(fisher)
        if estimator == "MML-3":
            prior = np.log(k) - 1.5 * np.log(1.0 + k * k)
            fisher = k * _a(k) * _a_prime(k)
            return prior + ll - math.log(n) - 0.5 * np.log(fisher)
    raise ValueError(estimator)


def grid_argmax(estimator: str, n: int, rbar: float, n_points: int = 1_000_000,
                lo: float = 1e-8, hi: float = 1e6) -> float:
    """Dense log-grid search of the stated objective, plus the zero boundary."""
    grid = np.concatenate(([0.0], np.geomspace(lo, hi, n_points)))
    vals = objective_grid(estimator, n, rbar, grid)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    return float(grid[int(np.argmax(vals))])


class GridOracle:
    """Dense-grid argmax with the kappa-only terms precomputed once.

    Rebuilding ive/A/A' on a million-point grid per query would dominate the
    acceptance run; they depend only on the grid, so they are cached and the
    per-query work is the (n, rbar)-dependent linear combination.
    """

    def __init__(self, n_points: int = 1_000_000, lo: float = 1e-8, hi: float = 1e6):
        self.grid = np.concatenate(([0.0], np.geomspace(lo, hi, n_points)))
        k = ensure_zero_proxy(self.grid)
        self._k = k
        with np.errstate(divide="ignore", under="ignore", over="ignore"):
            self._a = _a(k)
            self._ap = _a_prime(k)
            self._log_ive0 = np.log(ive(0, k))
            self._log1pk2 = np.log1p(k * k)
            self._log_k = np.log(k)
            self._log_kaap = np.log(k * self._a * self._ap)

    def argmax(self, estimator: str, n: int, rbar: float) -> float:
        k = self._k
        ll = -n * (math.log(2 * math.pi) + k + self._log_ive0) + n * rbar * k
        with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
            if estimator == "BayesEst-2-jMAP-km":
                vals = math.log(2.0 / math.pi) - self._log1pk2 + ll
            elif estimator == "BayesEst-3-jMAP-km":
                vals = self._log_k - 1.5 * self._log1pk2 + ll
            elif estimator == "BayesEst-3-jMAP-xy":
                vals = -1.5 * self._log1pk2 + ll
            elif estimator == "MML-2":
                fisher = (k * self._a + 3.0 / (n * math.pi**2)) * self._ap
                vals = math.log(2.0 / math.pi) - self._log1pk2 + ll - 0.5 * np.log(fisher)
            elif estimator == "MML-3":
                vals = (
                    self._log_k
                    - 1.5 * self._log1pk2
                    + ll
                    - math.log(n)
                    - 0.5 * self._log_kaap
                )
            else:
                raise ValueError(estimator)
        vals = np.where(np.isnan(vals), -np.inf, vals)
        return float(self.grid[int(np.argmax(vals))])
