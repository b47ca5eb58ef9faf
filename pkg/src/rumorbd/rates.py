"""Rate families and the integral transforms built on them.

A rate family supplies the instantaneous spreading rate ``lam(t)`` and
forgetting rate ``mu(t)`` of the two-type population process.  Three families
are provided:

* :class:`Constant`     -- ``lam(t) = lam``, ``mu(t) = mu``.
* :class:`Proportional` -- ``lam(t) = rho * mu(t)`` with ``mu`` drawn from a
  pluggable base profile (:class:`ConstantMu`, :class:`CosineMu`, or a
  growth-curve-induced profile defined in :mod:`rumorbd.growth`).
* :class:`Explicit`     -- arbitrary callables plus a declared sup bound used
  by the exact thinning sampler.

The integral transforms underlying every closed-form moment are::

    L(t)     = int_0^t (lam - mu)            eta(t) = exp(L(t))
    M(t)     = int_0^t mu
    phi_x(t) = int_0^t lam / eta             phi_y(t) = int_0^t lam * eta
    gamma(t) = int_0^t mu * eta * (2 phi_x + j - 1)

For Constant/Proportional rates all five reduce to closed kernel expressions
in ``(rho, M)``.  For anything else the un-nested ``L`` and ``M`` are computed
by adaptive quadrature, while the nested ``phi_x``/``phi_y``/``gamma`` come
from a single ODE sweep over the state ``[L, M, phi_x, G1, G2]`` (with
``phi_y = G1 + eta - 1`` and ``gamma = (j-1) G1 + 2 G2``), extended
incrementally from cached checkpoints so repeated evaluations never
re-integrate from zero.
"""

from __future__ import annotations

import abc
import bisect
import math
import threading
from dataclasses import dataclass, field
from typing import Callable

from scipy.integrate import quad, solve_ivp

from ._kernels import f1, f2
from .errors import DataError, DomainError, NumericsError

_TWO_PI = 2.0 * math.pi

_QUAD_OPTS = dict(epsabs=1e-10, epsrel=1e-9, limit=200)
_SWEEP_OPTS = dict(method="DOP853", rtol=1e-12, atol=1e-14)

_CACHE_LOCK = threading.Lock()


def _check_positive(name: str, value: float) -> None:
    if not (value > 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value}")


def _check_time(t: float) -> None:
    if not (t >= 0.0 and math.isfinite(t)):
        raise DomainError(f"time must be finite and >= 0, got {t}")


# ===== Base forgetting-rate profiles ==========================================


class MuBase(abc.ABC):
    """Time profile of the forgetting rate inside a proportional family."""

    @abc.abstractmethod
    def mu_at(self, t: float) -> float: ...

    @abc.abstractmethod
    def big_m(self, t: float) -> float:
        """Cumulative intensity ``int_0^t mu``."""

    @abc.abstractmethod
    def mu_sup(self, t0: float, t1: float) -> float:
        """An exact upper bound of ``mu`` on ``[t0, t1]``."""

    def validate_horizon(self, horizon: float) -> None:
        """Raise if the profile leaves the model's domain before ``horizon``."""


@dataclass(frozen=True)
class ConstantMu(MuBase):
    """Constant forgetting rate."""

    mu: float

    def __post_init__(self) -> None:
        _check_positive("mu", self.mu)

    def mu_at(self, t: float) -> float:
        return self.mu

    def big_m(self, t: float) -> float:
        _check_time(t)
        return self.mu * t

    def mu_sup(self, t0: float, t1: float) -> float:
        return self.mu


def _cos_extremes(theta0: float, theta1: float) -> tuple[float, float]:
    """(min, max) of cos over [theta0, theta1]."""
    span = theta1 - theta0
    if span >= _TWO_PI:
        return -1.0, 1.0
    a = theta0 % _TWO_PI
    b = a + span
    c0, c1 = math.cos(a), math.cos(b)
    hi = 1.0 if (a == 0.0 or b >= _TWO_PI) else max(c0, c1)
    lo = -1.0 if (a <= math.pi <= b or a <= 3.0 * math.pi <= b) else min(c0, c1)
    return lo, hi


@dataclass(frozen=True)
class CosineMu(MuBase):
    """Seasonal forgetting rate ``mu + alpha * cos(2 pi t / period)``.

    Requires ``mu > |alpha| > 0`` so the rate stays strictly positive.
    """

    mu: float
    alpha: float
    period: float

    def __post_init__(self) -> None:
        _check_positive("mu", self.mu)
        _check_positive("period", self.period)
        if not (0.0 < abs(self.alpha) < self.mu):
            raise DomainError(
                f"cosine amplitude must satisfy 0 < |alpha| < mu, got "
                f"alpha={self.alpha}, mu={self.mu}"
            )

    def mu_at(self, t: float) -> float:
        return self.mu + self.alpha * math.cos(_TWO_PI * t / self.period)

    def big_m(self, t: float) -> float:
        _check_time(t)
        return self.mu * t + (self.alpha * self.period / _TWO_PI) * math.sin(
            _TWO_PI * t / self.period
        )

    def mu_sup(self, t0: float, t1: float) -> float:
        lo, hi = _cos_extremes(_TWO_PI * t0 / self.period, _TWO_PI * t1 / self.period)
        return self.mu + max(self.alpha * lo, self.alpha * hi)


# ===== Rate families ==========================================================


class RateFamily(abc.ABC):
    """Common interface of the three rate families."""

    @abc.abstractmethod
    def lam_at(self, t: float) -> float: ...

    @abc.abstractmethod
    def mu_at(self, t: float) -> float: ...

    @abc.abstractmethod
    def total_rate_sup(self, t0: float, t1: float) -> float:
        """An upper bound of ``lam + mu`` on ``[t0, t1]`` (thinning envelope)."""

    def proportional_view(self) -> tuple[float, MuBase] | None:
        """(rho, mu-profile) when the family is a proportional one, else None."""
        return None

    def validate_horizon(self, horizon: float) -> None:
        """Raise if the family leaves the model's domain before ``horizon``."""


@dataclass(frozen=True)
class Constant(RateFamily):
    """Constant spreading and forgetting rates."""

    lam: float
    mu: float

    def __post_init__(self) -> None:
        _check_positive("lam", self.lam)
        _check_positive("mu", self.mu)

    def lam_at(self, t: float) -> float:
        return self.lam

    def mu_at(self, t: float) -> float:
        return self.mu

    def total_rate_sup(self, t0: float, t1: float) -> float:
        return self.lam + self.mu

    def proportional_view(self) -> tuple[float, MuBase]:
        return self.lam / self.mu, ConstantMu(self.mu)


@dataclass(frozen=True)
class Proportional(RateFamily):
    """``lam(t) = rho * mu(t)`` for a pluggable forgetting profile."""

    rho: float
    base_mu: MuBase

    def __post_init__(self) -> None:
        _check_positive("rho", self.rho)
        if not isinstance(self.base_mu, MuBase):
            raise DomainError(
                f"base_mu must be a forgetting-rate profile, got {self.base_mu!r}"
            )
        curve_rho = getattr(self.base_mu, "rho", None)
        if curve_rho is not None and not math.isclose(
            curve_rho, self.rho, rel_tol=1e-12
        ):
            raise DomainError(
                f"rate ratio {self.rho} disagrees with the ratio {curve_rho} "
                "baked into the curve-induced forgetting profile"
            )

    def lam_at(self, t: float) -> float:
        return self.rho * self.base_mu.mu_at(t)

    def mu_at(self, t: float) -> float:
        return self.base_mu.mu_at(t)

    def total_rate_sup(self, t0: float, t1: float) -> float:
        return (1.0 + self.rho) * self.base_mu.mu_sup(t0, t1)

    def proportional_view(self) -> tuple[float, MuBase]:
        return self.rho, self.base_mu

    def validate_horizon(self, horizon: float) -> None:
        self.base_mu.validate_horizon(horizon)


@dataclass(frozen=True)
class Explicit(RateFamily):
    """Arbitrary rate callables with a declared total-rate sup bound.

    ``rate_sup_fn(t0, t1)`` must bound ``lam + mu`` from above on ``[t0, t1]``;
    the thinning sampler verifies the bound pointwise and raises if violated.
    """

    lambda_fn: Callable[[float], float]
    mu_fn: Callable[[float], float]
    rate_sup_fn: Callable[[float, float], float]

    def lam_at(self, t: float) -> float:
        return self.lambda_fn(t)

    def mu_at(self, t: float) -> float:
        return self.mu_fn(t)

    def total_rate_sup(self, t0: float, t1: float) -> float:
        return self.rate_sup_fn(t0, t1)


# ===== Transform cache plumbing ===============================================


def _instance_cache(rates: RateFamily) -> dict:
    cache = getattr(rates, "_transform_cache", None)
    if cache is None:
        cache = {
            "quad_L": {},
            "quad_M": {},
            "sweep_times": [0.0],
            "sweep_states": [(0.0, 0.0, 0.0, 0.0, 0.0)],
        }
        object.__setattr__(rates, "_transform_cache", cache)
    return cache


def _quad_memo(rates: RateFamily, key: str, fn: Callable[[float], float], t: float) -> float:
    cache = _instance_cache(rates)[key]
    if t not in cache:
        val, _ = quad(fn, 0.0, t, **_QUAD_OPTS)
        cache[t] = val
    return cache[t]


def _sweep(rates: RateFamily, t: float) -> tuple[float, float, float, float, float]:
    """State ``(L, M, phi_x, G1, G2)`` at ``t`` via incremental integration."""
    cache = _instance_cache(rates)
    times: list[float] = cache["sweep_times"]
    states: list[tuple] = cache["sweep_states"]
    idx = bisect.bisect_right(times, t) - 1
    t0 = times[idx]
    y0 = states[idx]
    if t - t0 < 1e-15:
        return y0

    def rhs(s: float, y):
        big_l = y[0]
        lam = rates.lam_at(s)
        mu = rates.mu_at(s)
        el = math.exp(big_l) if big_l < 709.0 else math.inf
        eml = math.exp(-big_l) if big_l > -709.0 else math.inf
        return [lam - mu, mu, lam * eml, mu * el, mu * el * y[2]]

    sol = solve_ivp(rhs, (t0, t), y0, **_SWEEP_OPTS)
    if not sol.success:
        raise NumericsError(f"transform sweep failed at t={t}: {sol.message}")
    y1 = tuple(float(v) for v in sol.y[:, -1])
    if not all(math.isfinite(v) for v in y1):
        raise NumericsError(
            f"transform sweep overflowed at t={t}; use the closed route"
        )
    pos = bisect.bisect_right(times, t)
    times.insert(pos, t)
    states.insert(pos, y1)
    return y1


def _resolve_method(rates: RateFamily, method: str) -> str:
    if method not in ("auto", "closed", "quadrature"):
        raise DomainError(f"unknown transform method {method!r}")
    view = rates.proportional_view()
    if method == "closed" and view is None:
        raise DomainError("closed transforms need a constant or proportional family")
    if method == "auto":
        return "closed" if view is not None else "quadrature"
    return method


# ===== Transforms =============================================================


def big_m(rates: RateFamily, t: float, method: str = "auto") -> float:
    """Cumulative forgetting intensity ``M(t) = int_0^t mu``."""
    _check_time(t)
    how = _resolve_method(rates, method)
    if how == "closed":
        _, base = rates.proportional_view()
        return base.big_m(t)
    with _CACHE_LOCK:
        return _quad_memo(rates, "quad_M", rates.mu_at, t)


def eta(rates: RateFamily, t: float, method: str = "auto") -> float:
    """Growth factor ``eta(t) = exp(int_0^t (lam - mu))``."""
    _check_time(t)
    how = _resolve_method(rates, method)
    if how == "closed":
        rho, base = rates.proportional_view()
        x = (rho - 1.0) * base.big_m(t)
        return math.exp(x) if x < 709.0 else math.inf
    with _CACHE_LOCK:
        big_l = _quad_memo(
            rates, "quad_L", lambda s: rates.lam_at(s) - rates.mu_at(s), t
        )
    return math.exp(big_l) if big_l < 709.0 else math.inf


def phi_x(rates: RateFamily, t: float, method: str = "auto") -> float:
    """Discounted spreading integral ``int_0^t lam / eta``."""
    _check_time(t)
    how = _resolve_method(rates, method)
    if how == "closed":
        rho, base = rates.proportional_view()
        m = base.big_m(t)
        return rho * m * f1(-(rho - 1.0) * m)
    with _CACHE_LOCK:
        return _sweep(rates, t)[2]


def phi_y(rates: RateFamily, t: float, method: str = "auto") -> float:
    """Amplified spreading integral ``int_0^t lam * eta``."""
    _check_time(t)
    how = _resolve_method(rates, method)
    if how == "closed":
        rho, base = rates.proportional_view()
        m = base.big_m(t)
        return rho * m * f1((rho - 1.0) * m)
    with _CACHE_LOCK:
        big_l, _, _, g1, _ = _sweep(rates, t)
    return g1 + math.expm1(big_l)


def gamma(rates: RateFamily, j: int, t: float, method: str = "auto") -> float:
    """Mixed-moment integrand ``int_0^t mu eta (2 phi_x + j - 1)``."""
    _check_time(t)
    if not isinstance(j, int) or isinstance(j, bool) or j < 1:
        raise DomainError(f"initial spreader count must be an integer >= 1, got {j!r}")
    how = _resolve_method(rates, method)
    if how == "closed":
        rho, base = rates.proportional_view()
        m = base.big_m(t)
        x = (rho - 1.0) * m
        return (j - 1) * m * f1(x) + 2.0 * rho * m * m * f2(x)
    with _CACHE_LOCK:
        _, _, _, g1, g2 = _sweep(rates, t)
    return (j - 1) * g1 + 2.0 * g2


# ===== Config parsing =========================================================


def mu_base_from_config(cfg: dict) -> MuBase:
    """Build a forgetting-rate profile from a JSON-style mapping."""
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise DataError(f"forgetting-rate config needs a 'kind' key, got {cfg!r}")
    kind = cfg["kind"]
    if kind == "constant":
        return ConstantMu(mu=float(cfg["mu"]))
    if kind == "cosine":
        return CosineMu(
            mu=float(cfg["mu"]),
            alpha=float(cfg["alpha"]),
            period=float(cfg.get("period", cfg.get("Q", 0.0))),
        )
    if kind == "curve":
        from .growth import CurveInducedMu, curve_from_config

        return CurveInducedMu(curve_from_config(cfg["curve"]))
    raise DataError(f"unknown forgetting-rate profile kind {kind!r}")


def rates_from_config(cfg: dict) -> RateFamily:
    """Build a rate family from a JSON-style mapping."""
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise DataError(f"rates config needs a 'kind' key, got {cfg!r}")
    kind = cfg["kind"]
    if kind == "constant":
        lam = cfg.get("lam", cfg.get("lambda"))
        if lam is None or "mu" not in cfg:
            raise DataError("constant rates need 'lam' (or 'lambda') and 'mu'")
        return Constant(lam=float(lam), mu=float(cfg["mu"]))
    if kind == "proportional":
        if "rho" not in cfg or "base" not in cfg:
            raise DataError("proportional rates need 'rho' and 'base'")
        return Proportional(rho=float(cfg["rho"]), base_mu=mu_base_from_config(cfg["base"]))
    raise DataError(f"unknown rate family kind {kind!r} (explicit rates are code-only)")
