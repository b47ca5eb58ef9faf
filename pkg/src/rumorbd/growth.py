"""Growth-curve families and the time-varying rates they induce.

Six spreader-mean (X) families and two inactive-mean (Y) families are
supported.  Every curve carries its initial spreader count ``j`` and rate
ratio ``rho > 1``; postulating that the curve equals the corresponding
proportional-family mean defines a cumulative forgetting intensity::

    X family:  m(t) = j exp((rho-1) M(t))   =>  M(t) = log(m(t)/j) / (rho-1)
    Y family:  m(t) = j (e^{(rho-1)M} - 1)/(rho-1)
                                            =>  M(t) = log1p((rho-1) m(t)/j)/(rho-1)

and an instantaneous forgetting rate ``mu(t) = M'(t)`` (with
``lam(t) = rho mu(t)``), turning any fitted curve into a fully specified
stochastic model.  Each family implements the induced ``M`` and ``mu`` in
closed form, plus an exact upper bound of ``mu`` over a window (used by the
exact thinning sampler).

The quartic-exponent multisigmoidal family is the one member whose induced
``mu`` can become negative (its polynomial exponent ``Q`` eventually
decreases); its validity window ``{t : Q'(t) >= 0}`` is computed exactly and
enforced before simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DataError, DomainError
from .moments import MomentReport, report_from_prop
from .rates import MuBase, Proportional


def _exp(v: float) -> float:
    return math.exp(v) if v < 709.0 else math.inf


def _logaddexp(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    if math.isinf(a) and a < 0:
        return a
    return a + math.log1p(math.exp(b - a))


def _nonneg(big_m_value: float) -> float:
    # log-difference forms can round M(0) to -1 ulp; the intensity integral
    # itself is never negative, so snap boundary noise back to exact zero
    return 0.0 if -1e-12 < big_m_value < 0.0 else big_m_value


def _check_time(t: float) -> None:
    if not (t >= 0.0 and math.isfinite(t)):
        raise DomainError(f"time must be finite and >= 0, got {t}")


def _check_common(j: int, rho: float) -> None:
    if not isinstance(j, int) or isinstance(j, bool) or j < 1:
        raise DomainError(f"initial spreader count must be an integer >= 1, got {j!r}")
    if not (rho > 1.0 and math.isfinite(rho)):
        raise DomainError(f"curve families require a rate ratio rho > 1, got {rho}")


def _check_positive(name: str, v: float) -> None:
    if not (v > 0.0 and math.isfinite(v)):
        raise DomainError(f"{name} must be positive and finite, got {v}")


# ===== Spreader-mean (X) families =============================================


@dataclass(frozen=True)
class Gompertz:
    """m(t) = j exp(alpha (1 - e^{-beta t}))."""

    alpha: float
    beta: float
    j: int = 1
    rho: float = 2.0

    family = "gompertz"
    kind = "x"
    param_names = ("alpha", "beta")

    def __post_init__(self) -> None:
        _check_positive("alpha", self.alpha)
        _check_positive("beta", self.beta)
        _check_common(self.j, self.rho)

    def mean(self, t: float) -> float:
        return self.j * _exp(self.alpha * -math.expm1(-self.beta * t))

    def mean_array(self, t: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.j * np.exp(self.alpha * -np.expm1(-self.beta * t))

    def induced_big_m(self, t: float) -> float:
        return self.alpha * -math.expm1(-self.beta * t) / (self.rho - 1.0)

    def induced_mu(self, t: float) -> float:
        return self.alpha * self.beta * math.exp(-self.beta * t) / (self.rho - 1.0)

    def induced_mu_sup(self, t0: float, t1: float) -> float:
        return self.induced_mu(t0)  # decreasing

    def mean_limit(self) -> float:
        return self.j * _exp(self.alpha)

    def big_m_limit(self) -> float:
        return self.alpha / (self.rho - 1.0)


@dataclass(frozen=True)
class GenGompertz:
    """m(t) = j exp(a b t / (t + b))."""

    a: float
    b: float
    j: int = 1
    rho: float = 2.0

    family = "gen_gompertz"
    kind = "x"
    param_names = ("a", "b")

    def __post_init__(self) -> None:
        _check_positive("a", self.a)
        _check_positive("b", self.b)
        _check_common(self.j, self.rho)

    def mean(self, t: float) -> float:
        return self.j * _exp(self.a * self.b * t / (t + self.b))

    def mean_array(self, t: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.j * np.exp(self.a * self.b * t / (t + self.b))

    def induced_big_m(self, t: float) -> float:
        return self.a * self.b * t / ((self.rho - 1.0) * (t + self.b))

    def induced_mu(self, t: float) -> float:
        return self.a * self.b**2 / ((self.rho - 1.0) * (t + self.b) ** 2)

    def induced_mu_sup(self, t0: float, t1: float) -> float:
        return self.induced_mu(t0)  # decreasing

    def mean_limit(self) -> float:
        return self.j * _exp(self.a * self.b)

    def big_m_limit(self) -> float:
        return self.a * self.b / (self.rho - 1.0)


@dataclass(frozen=True)
class Logistic:
    """m(t) = C j / (j + (C - j) e^{-r t})."""

    c: float
    r: float
    j: int = 1
    rho: float = 2.0

    family = "logistic"
    kind = "x"
    param_names = ("c", "r")

    def __post_init__(self) -> None:
        _check_positive("c", self.c)
        _check_positive("r", self.r)
        _check_common(self.j, self.rho)
        if not self.c > self.j:
            raise DomainError(
                f"carrying capacity must exceed the initial count, got c={self.c} <= j={self.j}"
            )

    def mean(self, t: float) -> float:
        return self.c * self.j / (self.j + (self.c - self.j) * math.exp(-self.r * t))

    def mean_array(self, t: np.ndarray) -> np.ndarray:
        return self.c * self.j / (self.j + (self.c - self.j) * np.exp(-self.r * t))

    def induced_big_m(self, t: float) -> float:
        # table form (r t + log C - log(C + j(e^{rt} - 1)))/(rho - 1), evaluated
        # through logaddexp so huge r t cannot overflow
        num = (
            self.r * t
            + math.log(self.c)
            - _logaddexp(math.log(self.c - self.j), math.log(self.j) + self.r * t)
        )
        return _nonneg(num / (self.rho - 1.0))

    def induced_mu(self, t: float) -> float:
        w = math.exp(-self.r * t)
        cj = self.c - self.j
        return self.r * cj * w / ((self.rho - 1.0) * (cj * w + self.j))

    def induced_mu_sup(self, t0: float, t1: float) -> float:
        return self.induced_mu(t0)  # decreasing

    def mean_limit(self) -> float:
        return self.c

    def big_m_limit(self) -> float:
        return math.log(self.c / self.j) / (self.rho - 1.0)


@dataclass(frozen=True)
class ExtLogistic:
    """Extended logistic with asymmetry parameter eps in (-1, 1).

    m(t) = (A + B e^{(1+eps)t}) / (D + E e^{(1+eps)t}) with
    A = (eps-1) N (N-j), B = N (2 eps j + N - eps N), D = 2 eps (N-j),
    E = 2 eps j + N - eps N; then m(0) = j and m(oo) = N.
    """

    n: float
    eps: float
    j: int = 1
    rho: float = 2.0

    family = "ext_logistic"
    kind = "x"
    param_names = ("n", "eps")

    def __post_init__(self) -> None:
        _check_positive("n", self.n)
        _check_common(self.j, self.rho)
        if not self.n > self.j:
            raise DomainError(
                f"carrying capacity must exceed the initial count, got n={self.n} <= j={self.j}"
            )
        if not (-1.0 < self.eps < 1.0):
            raise DomainError(f"asymmetry eps must lie in (-1, 1), got {self.eps}")

    def _coeffs(self) -> tuple[float, float, float, float]:
        n, j, e = self.n, float(self.j), self.eps
        a = (e - 1.0) * n * (n - j)
        b = n * (2.0 * e * j + n - e * n)
        d = 2.0 * e * (n - j)
        ee = 2.0 * e * j + n - e * n
        return a, b, d, ee

    def mean(self, t: float) -> float:
        a, b, d, ee = self._coeffs()
        wbar = math.exp(-(1.0 + self.eps) * t)
        return (a * wbar + b) / (d * wbar + ee)

    def mean_array(self, t: np.ndarray) -> np.ndarray:
        a, b, d, ee = self._coeffs()
        wbar = np.exp(-(1.0 + self.eps) * t)
        return (a * wbar + b) / (d * wbar + ee)

    def induced_big_m(self, t: float) -> float:
        a, b, d, ee = self._coeffs()
        wbar = math.exp(-(1.0 + self.eps) * t)
        num = math.log(a * wbar + b) - math.log(self.j) - math.log(d * wbar + ee)
        return _nonneg(num / (self.rho - 1.0))

    def induced_mu(self, t: float) -> float:
        a, b, d, ee = self._coeffs()
        n, j = self.n, float(self.j)
        one_eps = 1.0 + self.eps
        wbar = math.exp(-one_eps * t)
        k = one_eps**2 * n * (n - j) * ee
        return k * wbar / ((self.rho - 1.0) * (d * wbar + ee) * (a * wbar + b))

    def _mu_peak_time(self) -> float:
        """Interior maximum of the induced mu, or 0 when mu is decreasing."""
        a, b, d, ee = self._coeffs()
        ad = a * d
        if ad <= 0.0:  # eps >= 0: decreasing everywhere
            return 0.0
        wbar_star = math.sqrt(ee * b / ad)
        if wbar_star >= 1.0:
            return 0.0
        return -math.log(wbar_star) / (1.0 + self.eps)

    def induced_mu_sup(self, t0: float, t1: float) -> float:
        t_star = self._mu_peak_time()
        if t_star <= t0:
            return self.induced_mu(t0)
        if t_star >= t1:
            return self.induced_mu(t1)
        return self.induced_mu(t_star)

    def mean_limit(self) -> float:
        return self.n

    def big_m_limit(self) -> float:
        return math.log(self.n / self.j) / (self.rho - 1.0)


@dataclass(frozen=True)
class MultisigLogistic:
    """Logistic with a quartic exponent: m(t) = C j / (j + (C-j) e^{-Q(t)}).

    Q(t) = b1 t + b2 t^2 + b3 t^3 + b4 t^4 with b4 < 0.  Setting
    (b1, b2, b3, b4) -> (r, 0, 0, 0-) recovers the plain logistic curve.  The
    induced forgetting rate is nonnegative exactly where Q' >= 0; the validity
    window is computed exactly from the roots of Q'.
    """

    c: float
    betas: tuple[float, float, float, float]
    j: int = 1
    rho: float = 2.0

    family = "multisig_logistic"
    kind = "x"
    param_names = ("c", "beta1", "beta2", "beta3", "beta4")

    def __post_init__(self) -> None:
        _check_positive("c", self.c)
        _check_common(self.j, self.rho)
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if len(self.betas) != 4:
            raise DomainError(f"exponent needs exactly 4 coefficients, got {len(self.betas)}")
        if not self.betas[3] < 0.0:
            raise DomainError(f"leading exponent coefficient must be negative, got {self.betas[3]}")
        if not self.c > self.j:
            raise DomainError(
                f"carrying capacity must exceed the initial count, got c={self.c} <= j={self.j}"
            )

    def q(self, t: float) -> float:
        b1, b2, b3, b4 = self.betas
        return t * (b1 + t * (b2 + t * (b3 + t * b4)))

    def q_prime(self, t: float) -> float:
        b1, b2, b3, b4 = self.betas
        return b1 + t * (2.0 * b2 + t * (3.0 * b3 + t * 4.0 * b4))

    def mean(self, t: float) -> float:
        qv = self.q(t)
        if qv >= 0.0:
            return self.c * self.j / (self.j + (self.c - self.j) * math.exp(-qv))
        eq = _exp(qv)
        return self.c * self.j * eq / (self.j * eq + (self.c - self.j))

    def mean_array(self, t: np.ndarray) -> np.ndarray:
        b1, b2, b3, b4 = self.betas
        qv = t * (b1 + t * (b2 + t * (b3 + t * b4)))
        cj = self.c - self.j
        with np.errstate(over="ignore", invalid="ignore"):
            pos = self.c * self.j / (self.j + cj * np.exp(-qv))
            eq = np.exp(np.minimum(qv, 0.0))
            neg = self.c * self.j * eq / (self.j * eq + cj)
        return np.where(qv >= 0.0, pos, neg)

    def induced_big_m(self, t: float) -> float:
        qv = self.q(t)
        num = (
            qv
            + math.log(self.c)
            - _logaddexp(math.log(self.c - self.j), math.log(self.j) + qv)
        )
        return _nonneg(num / (self.rho - 1.0))

    def induced_mu(self, t: float) -> float:
        qv = self.q(t)
        w = _exp(-qv)
        cj = self.c - self.j
        if math.isinf(w):
            return self.q_prime(t) / (self.rho - 1.0)
        return self.q_prime(t) * cj * w / ((self.rho - 1.0) * (self.j + cj * w))

    def _q_prime_roots(self) -> list[float]:
        b1, b2, b3, b4 = self.betas
        roots = np.roots([4.0 * b4, 3.0 * b3, 2.0 * b2, b1])
        out = []
        for z in roots:
            if abs(z.imag) <= 1e-9 * (1.0 + abs(z)):
                if z.real > 1e-12:
                    out.append(float(z.real))
        return sorted(out)

    def induced_validity_end(self) -> float:
        """Largest T with Q' >= 0 on [0, T] (0 if Q' < 0 right away)."""
        pts = [0.0] + self._q_prime_roots()
        scale = 1.0 + max(abs(b) for b in self.betas)
        for i, s in enumerate(pts):
            mid = 0.5 * (s + pts[i + 1]) if i + 1 < len(pts) else s + 1.0
            if self.q_prime(mid) < -1e-12 * scale:
                return s
        return math.inf

    def validate_horizon(self, horizon: float) -> None:
        end = self.induced_validity_end()
        if horizon > end + 1e-9:
            raise DomainError(
                f"curve-induced forgetting rate turns negative at t~{end:.6g}; "
                f"requested horizon {horizon} exceeds the validity window"
            )

    def induced_mu_sup(self, t0: float, t1: float) -> float:
        b1, b2, b3, b4 = self.betas
        cands = [t0, t1]
        # interior extrema of Q' are roots of Q'' (a quadratic, b4 != 0)
        aq, bq, cq = 12.0 * b4, 6.0 * b3, 2.0 * b2
        disc = bq * bq - 4.0 * aq * cq
        if disc >= 0.0:
            sq = math.sqrt(disc)
            for z in ((-bq - sq) / (2.0 * aq), (-bq + sq) / (2.0 * aq)):
                if t0 < z < t1:
                    cands.append(z)
        qp_max = max(0.0, max(self.q_prime(s) for s in cands))
        qv0 = self.q(t0)
        w0 = _exp(-qv0)
        cj = self.c - self.j
        if math.isinf(w0):
            return qp_max / (self.rho - 1.0)
        return qp_max * cj * w0 / ((self.rho - 1.0) * (self.j + cj * w0))

    def mean_limit(self) -> float:
        raise DomainError("the quartic-exponent curve has no long-run limit inside its validity window")


@dataclass(frozen=True)
class ModKorf:
    """m(t) = j exp((alpha/beta)(1 - (1+t)^{-beta}))."""

    alpha: float
    beta: float
    j: int = 1
    rho: float = 2.0

    family = "mod_korf"
    kind = "x"
    param_names = ("alpha", "beta")

    def __post_init__(self) -> None:
        _check_positive("alpha", self.alpha)
        _check_positive("beta", self.beta)
        _check_common(self.j, self.rho)

    def _u(self, t: float) -> float:
        # 1 - (1+t)^{-beta}, evaluated without cancellation
        return -math.expm1(-self.beta * math.log1p(t))

    def mean(self, t: float) -> float:
        return self.j * _exp(self.alpha / self.beta * self._u(t))

    def mean_array(self, t: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            u = -np.expm1(-self.beta * np.log1p(t))
            return self.j * np.exp(self.alpha / self.beta * u)

    def induced_big_m(self, t: float) -> float:
        return self.alpha / self.beta * self._u(t) / (self.rho - 1.0)

    def induced_mu(self, t: float) -> float:
        return self.alpha * math.exp(-(self.beta + 1.0) * math.log1p(t)) / (self.rho - 1.0)

    def induced_mu_sup(self, t0: float, t1: float) -> float:
        return self.induced_mu(t0)  # decreasing

    def mean_limit(self) -> float:
        return self.j * _exp(self.alpha / self.beta)

    def big_m_limit(self) -> float:
        return self.alpha / self.beta / (self.rho - 1.0)


# ===== Inactive-mean (Y) families =============================================


@dataclass(frozen=True)
class Korf:
    """m_Y(t) = (j/(rho-1)) exp(-(alpha/beta) t^{-beta}), with m_Y(0) = 0."""

    alpha: float
    beta: float
    j: int = 1
    rho: float = 2.0

    family = "korf"
    kind = "y"
    param_names = ("alpha", "beta")

    def __post_init__(self) -> None:
        _check_positive("alpha", self.alpha)
        _check_positive("beta", self.beta)
        _check_common(self.j, self.rho)

    def _w(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        return math.exp(-(self.alpha / self.beta) * t**-self.beta)

    def mean(self, t: float) -> float:
        return self.j / (self.rho - 1.0) * self._w(t)

    def mean_array(self, t: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", over="ignore"):
            w = np.exp(-(self.alpha / self.beta) * np.power(t, -self.beta))
        return self.j / (self.rho - 1.0) * np.where(t > 0.0, w, 0.0)

    def induced_big_m(self, t: float) -> float:
        return math.log1p(self._w(t)) / (self.rho - 1.0)

    def induced_mu(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        w = self._w(t)
        return self.alpha * t ** -(self.beta + 1.0) * w / ((self.rho - 1.0) * (1.0 + w))

    def _envelope(self, t: float) -> float:
        # dominating bound alpha t^{-beta-1} w(t) / (rho-1) >= mu(t)
        if t <= 0.0:
            return 0.0
        return self.alpha * t ** -(self.beta + 1.0) * self._w(t) / (self.rho - 1.0)

    def induced_mu_sup(self, t0: float, t1: float) -> float:
        t_star = (self.alpha / (self.beta + 1.0)) ** (1.0 / self.beta)
        if t1 <= t_star:
            return self._envelope(t1)
        if t0 >= t_star:
            return self._envelope(t0)
        return self._envelope(t_star)

    def mean_limit(self) -> float:
        return self.j / (self.rho - 1.0)

    def big_m_limit(self) -> float:
        return math.log(2.0) / (self.rho - 1.0)


@dataclass(frozen=True)
class Mitscherlich:
    """m_Y(t) = beta (1 - e^{-alpha t})."""

    alpha: float
    beta: float
    j: int = 1
    rho: float = 2.0

    family = "mitscherlich"
    kind = "y"
    param_names = ("alpha", "beta")

    def __post_init__(self) -> None:
        _check_positive("alpha", self.alpha)
        _check_positive("beta", self.beta)
        _check_common(self.j, self.rho)

    def mean(self, t: float) -> float:
        return self.beta * -math.expm1(-self.alpha * t)

    def mean_array(self, t: np.ndarray) -> np.ndarray:
        return self.beta * -np.expm1(-self.alpha * t)

    def induced_big_m(self, t: float) -> float:
        a = self.rho - 1.0
        return math.log1p(a * self.mean(t) / self.j) / a

    def induced_mu(self, t: float) -> float:
        a = self.rho - 1.0
        num = self.alpha * self.beta * math.exp(-self.alpha * t)
        return num / (self.j + a * self.mean(t))

    def induced_mu_sup(self, t0: float, t1: float) -> float:
        return self.induced_mu(t0)  # decreasing

    def mean_limit(self) -> float:
        return self.beta

    def big_m_limit(self) -> float:
        a = self.rho - 1.0
        return math.log1p(a * self.beta / self.j) / a


# ===== Registry and module-level operations ===================================

FAMILIES: dict[str, type] = {
    cls.family: cls
    for cls in (
        Gompertz, GenGompertz, Logistic, ExtLogistic, MultisigLogistic,
        ModKorf, Korf, Mitscherlich,
    )
}

GrowthCurve = (
    Gompertz | GenGompertz | Logistic | ExtLogistic | MultisigLogistic
    | ModKorf | Korf | Mitscherlich
)


def eval_curve(curve: GrowthCurve, t: float) -> float:
    """The curve's mean value at ``t``."""
    _check_time(t)
    return curve.mean(t)


def induced_m(curve: GrowthCurve, t: float) -> float:
    """Cumulative forgetting intensity the curve induces at ``t``.

    Raises a domain error when the implied ``M(t)`` is negative (possible only
    for the quartic-exponent family outside its validity window); roundoff
    negatives above -1e-12 are clamped to 0.
    """
    _check_time(t)
    m = curve.induced_big_m(t)
    if m < 0.0:
        if m >= -1e-12:
            return 0.0
        raise DomainError(
            f"curve implies a negative cumulative intensity at t={t} "
            "(outside the validity window)"
        )
    return m


def derived_report(curve: GrowthCurve, t: float) -> MomentReport:
    """Full moment report of the process the curve induces."""
    return report_from_prop(curve.rho, induced_m(curve, t), curve.j, t)


def _crossing_numeric(
    mfun: Callable[[float], float], m_thr: float, t_cap: float | None
) -> float:
    if t_cap is None:
        t_hi = 1.0
        for _ in range(80):
            if mfun(t_hi) >= m_thr:
                break
            t_hi *= 2.0
            if t_hi > 1e15:
                return 0.0
        else:
            return 0.0
    else:
        if t_cap <= 0.0 or mfun(t_cap) < m_thr:
            return 0.0
        t_hi = t_cap
    return float(brentq(lambda s: mfun(s) - m_thr, 0.0, t_hi, xtol=1e-12, rtol=8.9e-16))


def crossing_time_curve(curve: GrowthCurve) -> float:
    """First time with m_X = m_Y under the induced model; 0.0 when none exists.

    The crossing condition is ``M(t) = -log(2-rho)/(rho-1)``, which can only be
    met for 1 < rho < 2 and only when the curve's limiting intensity exceeds
    the threshold; otherwise the spreaders dominate from the start and the
    convention is to report 0.
    """
    rho = curve.rho
    if not rho < 2.0:
        return 0.0
    big_l = -math.log(2.0 - rho)
    m_thr = big_l / (rho - 1.0)

    if isinstance(curve, Gompertz):
        if curve.alpha <= big_l:
            return 0.0
        return -math.log1p(-big_l / curve.alpha) / curve.beta
    if isinstance(curve, Logistic):
        gap = curve.c * (2.0 - rho) - curve.j
        if gap <= 0.0:
            return 0.0
        return math.log((curve.c - curve.j) / gap) / curve.r
    if isinstance(curve, ModKorf):
        if curve.alpha <= curve.beta * big_l:
            return 0.0
        return (1.0 - curve.beta * big_l / curve.alpha) ** (-1.0 / curve.beta) - 1.0
    if isinstance(curve, Korf):
        if not rho < 1.5:
            return 0.0
        denom = math.log((2.0 - rho) / (rho - 1.0))
        return ((curve.alpha / curve.beta) / denom) ** (1.0 / curve.beta)
    if isinstance(curve, Mitscherlich):
        gap = curve.beta * (2.0 - rho) - curve.j
        if gap <= 0.0:
            return 0.0
        return math.log(curve.beta * (2.0 - rho) / gap) / curve.alpha
    if isinstance(curve, MultisigLogistic):
        end = curve.induced_validity_end()
        cap = end if math.isfinite(end) else None
        return _crossing_numeric(lambda s: induced_m(curve, s), m_thr, cap)
    # gen-Gompertz and extended logistic: numeric root with a finite limit test
    if curve.big_m_limit() <= m_thr:
        return 0.0
    return _crossing_numeric(lambda s: induced_m(curve, s), m_thr, None)


# ===== Curve-induced forgetting profile =======================================


@dataclass(frozen=True)
class CurveInducedMu(MuBase):
    """Forgetting-rate profile read off a growth curve.

    ``j`` and ``rho`` default to the values carried by the curve itself;
    passing them explicitly is allowed but must agree with the curve.
    """

    curve: GrowthCurve
    j: int | None = None
    rho: float | None = None

    def __post_init__(self) -> None:
        if self.j is None:
            object.__setattr__(self, "j", self.curve.j)
        elif self.j != self.curve.j:
            raise DomainError(
                f"initial count {self.j} disagrees with the curve's j={self.curve.j}"
            )
        if self.rho is None:
            object.__setattr__(self, "rho", self.curve.rho)
        elif not math.isclose(self.rho, self.curve.rho, rel_tol=1e-12):
            raise DomainError(
                f"rate ratio {self.rho} disagrees with the curve's rho={self.curve.rho}"
            )

    def mu_at(self, t: float) -> float:
        return self.curve.induced_mu(t)

    def big_m(self, t: float) -> float:
        return induced_m(self.curve, t)

    def mu_sup(self, t0: float, t1: float) -> float:
        return self.curve.induced_mu_sup(t0, t1)

    def validate_horizon(self, horizon: float) -> None:
        hook = getattr(self.curve, "validate_horizon", None)
        if hook is not None:
            hook(horizon)


def proportional_from_curve(curve: GrowthCurve) -> Proportional:
    """The proportional rate family a curve induces."""
    return Proportional(rho=curve.rho, base_mu=CurveInducedMu(curve))


# ===== Config parsing =========================================================


def curve_from_config(cfg: dict) -> GrowthCurve:
    """Build a growth curve from a JSON-style mapping."""
    if not isinstance(cfg, dict) or "family" not in cfg:
        raise DataError(f"curve config needs a 'family' key, got {cfg!r}")
    name = cfg["family"]
    cls = FAMILIES.get(name)
    if cls is None:
        raise DataError(
            f"unknown curve family {name!r} (known: {', '.join(sorted(FAMILIES))})"
        )
    j = int(cfg.get("j", 1))
    rho = float(cfg.get("rho", 2.0))
    try:
        if cls is MultisigLogistic:
            if "betas" in cfg:
                betas = tuple(float(b) for b in cfg["betas"])
            else:
                betas = tuple(float(cfg[f"beta{i}"]) for i in range(1, 5))
            return MultisigLogistic(c=float(cfg["c"]), betas=betas, j=j, rho=rho)
        kwargs = {name_: float(cfg[name_]) for name_ in cls.param_names}
    except KeyError as exc:
        raise DataError(f"curve family {name!r} is missing parameter {exc}") from exc
    return cls(j=j, rho=rho, **kwargs)


def curve_to_config(curve: GrowthCurve) -> dict:
    """JSON-style mapping for a curve (inverse of :func:`curve_from_config`)."""
    out: dict = {"family": curve.family, "j": curve.j, "rho": curve.rho}
    if isinstance(curve, MultisigLogistic):
        out["c"] = curve.c
        out["betas"] = list(curve.betas)
    else:
        for name in curve.param_names:
            out[name] = getattr(curve, name)
    return out
