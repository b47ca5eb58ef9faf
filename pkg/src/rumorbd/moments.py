"""Exact moments, dispersion indices and the spreader/inactive crossing time.

Two independent computation routes are provided and cross-checked in tests:

* the **closed** route, available for constant/proportional rate families,
  evaluates the kernel formulas of :mod:`rumorbd.proportional` at
  ``M = int_0^t mu``;
* the **ode** route integrates the moment differential system implied by the
  master equation directly (valid for any rate family)::

      m_X'   = (lam - mu) m_X
      m2_X'  = (lam + mu) m_X + 2 (lam - mu) m2_X
      m_Y'   = mu m_X
      m_XY'  = (lam - mu) m_XY + mu (m2_X - m_X)
      m2_Y'  = mu (2 m_XY + m_X)

At ``t = 0`` both variances vanish, so the correlation is reported as its
analytic ``t -> 0+`` limit ``-sqrt(mu(0)/(lam(0) + mu(0)))`` with the
``corr_is_limit`` flag set, and the dispersion index as its limit ``1 - 1/j``.
"""

from __future__ import annotations

import bisect
import math
import threading
from dataclasses import dataclass

from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import proportional as prop
from . import rates as rates_mod
from .errors import DomainError, NumericsError
from .rates import ConstantMu, RateFamily

_ODE_OPTS = dict(method="DOP853", rtol=1e-12, atol=1e-14)
_ODE_LOCK = threading.Lock()

_METHODS = ("auto", "closed", "ode")


@dataclass(frozen=True)
class MomentReport:
    """All first/second-order summaries of ``(X(t), Y(t))`` at one time."""

    t: float
    j: int
    m_x: float
    m_y: float
    var_x: float
    var_y: float
    m2_y: float
    m_xy: float
    cov: float
    corr: float
    fano_x: float
    fano_y: float
    cv_x: float
    cv_y: float
    r_index: float
    corr_is_limit: bool = False


def _check_j(j: int) -> None:
    if not isinstance(j, int) or isinstance(j, bool) or j < 1:
        raise DomainError(f"initial spreader count must be an integer >= 1, got {j!r}")


def _check_time(t: float) -> None:
    if not (t >= 0.0 and math.isfinite(t)):
        raise DomainError(f"time must be finite and >= 0, got {t}")


def _resolve(rates: RateFamily, method: str) -> str:
    if method not in _METHODS:
        raise DomainError(f"unknown moment method {method!r}")
    view = rates.proportional_view()
    if method == "closed" and view is None:
        raise DomainError("closed moments need a constant or proportional family")
    if method == "auto":
        return "closed" if view is not None else "ode"
    return method


def _corr_zero_limit(rates: RateFamily) -> float:
    view = rates.proportional_view()
    if view is not None:
        return -1.0 / math.sqrt(1.0 + view[0])
    lam0, mu0 = rates.lam_at(0.0), rates.mu_at(0.0)
    tot = lam0 + mu0
    return -math.sqrt(mu0 / tot) if tot > 0.0 else math.nan


# ===== ODE route ==============================================================


def _ode_states(rates: RateFamily, j: int, t: float) -> tuple[float, ...]:
    """(m_x, m2_x, m_y, m_xy, m2_y) at ``t`` via incremental integration."""
    with _ODE_LOCK:
        cache = getattr(rates, "_moment_cache", None)
        if cache is None:
            cache = {}
            object.__setattr__(rates, "_moment_cache", cache)
        if j not in cache:
            cache[j] = ([0.0], [(float(j), float(j * j), 0.0, 0.0, 0.0)])
        times, states = cache[j]
        idx = bisect.bisect_right(times, t) - 1
        t0, y0 = times[idx], states[idx]
        if t - t0 < 1e-15:
            return y0

        def rhs(s, y):
            mx, m2x, _, mxy, _ = y
            lam = rates.lam_at(s)
            mu = rates.mu_at(s)
            return [
                (lam - mu) * mx,
                (lam + mu) * mx + 2.0 * (lam - mu) * m2x,
                mu * mx,
                (lam - mu) * mxy + mu * (m2x - mx),
                mu * (2.0 * mxy + mx),
            ]

        sol = solve_ivp(rhs, (t0, t), y0, **_ODE_OPTS)
        if not sol.success:
            raise NumericsError(f"moment integration failed at t={t}: {sol.message}")
        y1 = tuple(float(v) for v in sol.y[:, -1])
        if not all(math.isfinite(v) for v in y1):
            raise NumericsError(f"moment integration overflowed at t={t}")
        pos = bisect.bisect_right(times, t)
        times.insert(pos, t)
        states.insert(pos, y1)
        return y1


def _clamp_var(v: float, scale: float) -> float:
    if v < 0.0:
        if v >= -1e-12 * max(1.0, scale):
            return 0.0
        raise NumericsError(f"variance assembly lost all precision ({v})")
    return v


# ===== Individual moments =====================================================


def mean_x(rates: RateFamily, j: int, t: float, method: str = "auto") -> float:
    """E[X(t)] = j * eta(t)."""
    _check_j(j)
    _check_time(t)
    how = _resolve(rates, method)
    if how == "closed":
        rho, base = rates.proportional_view()
        return prop.mean_x_prop(rho, base.big_m(t), j)
    return _ode_states(rates, j, t)[0]


def var_x(rates: RateFamily, j: int, t: float, method: str = "auto") -> float:
    """Var X(t)."""
    _check_j(j)
    _check_time(t)
    how = _resolve(rates, method)
    if how == "closed":
        rho, base = rates.proportional_view()
        return prop.var_x_prop(rho, base.big_m(t), j)
    mx, m2x, *_ = _ode_states(rates, j, t)
    return _clamp_var(m2x - mx * mx, m2x)


def mean_y(rates: RateFamily, j: int, t: float, method: str = "auto") -> float:
    """E[Y(t)] = j * (phi_y - eta + 1)."""
    _check_j(j)
    _check_time(t)
    how = _resolve(rates, method)
    if how == "closed":
        rho, base = rates.proportional_view()
        return prop.mean_y_prop(rho, base.big_m(t), j)
    return _ode_states(rates, j, t)[2]


def second_moment_y(rates: RateFamily, j: int, t: float, method: str = "auto") -> float:
    """E[Y(t)^2]."""
    _check_j(j)
    _check_time(t)
    how = _resolve(rates, method)
    if how == "closed":
        rho, base = rates.proportional_view()
        return prop.m2_y_prop(rho, base.big_m(t), j)
    return _ode_states(rates, j, t)[4]


def mixed_moment(rates: RateFamily, j: int, t: float, method: str = "auto") -> float:
    """E[X(t) Y(t)] = m_X(t) * gamma(t; j)."""
    _check_j(j)
    _check_time(t)
    how = _resolve(rates, method)
    if how == "closed":
        rho, base = rates.proportional_view()
        return prop.mixed_moment_prop(rho, base.big_m(t), j)
    return _ode_states(rates, j, t)[3]


def cov_corr(
    rates: RateFamily, j: int, t: float, method: str = "auto"
) -> tuple[float, float]:
    """(Cov, Corr) of ``(X(t), Y(t))``.

    At ``t = 0`` both variances vanish; the covariance is 0 and the
    correlation is reported as its analytic limit
    ``-sqrt(mu(0)/(lam(0)+mu(0)))``.
    """
    _check_j(j)
    _check_time(t)
    if t == 0.0:
        return 0.0, _corr_zero_limit(rates)
    how = _resolve(rates, method)
    if how == "closed":
        rho, base = rates.proportional_view()
        m = base.big_m(t)
        if m == 0.0:
            return 0.0, _corr_zero_limit(rates)
        return prop.cov_prop(rho, m, j), prop.corr_prop(rho, m, j)
    mx, m2x, my, mxy, m2y = _ode_states(rates, j, t)
    cov = mxy - mx * my
    vx = _clamp_var(m2x - mx * mx, m2x)
    vy = _clamp_var(m2y - my * my, m2y)
    if vx <= 0.0 or vy <= 0.0:
        return cov, _corr_zero_limit(rates)
    return cov, cov / (math.sqrt(vx) * math.sqrt(vy))


def r_index(rates: RateFamily, j: int, t: float, method: str = "auto") -> float:
    """Dispersion index ``gamma(t; j) / m_Y(t)``; limit ``1 - 1/j`` at t = 0."""
    _check_j(j)
    _check_time(t)
    if t == 0.0:
        return 1.0 - 1.0 / j
    how = _resolve(rates, method)
    if how == "closed":
        rho, base = rates.proportional_view()
        return prop.r_index_prop(rho, base.big_m(t), j)
    g = rates_mod.gamma(rates, j, t, method="quadrature")
    my = _ode_states(rates, j, t)[2]
    if my <= 0.0:
        return 1.0 - 1.0 / j
    return g / my


def fano_cv(
    rates: RateFamily, j: int, t: float, method: str = "auto"
) -> tuple[float, float, float, float]:
    """(Fano_X, CV_X, Fano_Y, CV_Y).

    At ``t = 0`` the X-pair is exactly 0 and the Y-pair is reported as its
    ``t -> 0+`` limits (Fano_Y -> 1, CV_Y -> oo).
    """
    rep = moment_report(rates, j, t, method)
    return rep.fano_x, rep.cv_x, rep.fano_y, rep.cv_y


# ===== Bundled report =========================================================


def _assemble_report(
    t: float,
    j: int,
    m_x_: float,
    m_y_: float,
    var_x_: float,
    var_y_: float,
    m2_y_: float,
    m_xy_: float,
    cov_: float,
    corr_: float,
    r_: float,
    corr_is_limit: bool,
) -> MomentReport:
    fano_x_ = var_x_ / m_x_ if m_x_ > 0.0 else 0.0
    cv_x_ = math.sqrt(var_x_) / m_x_ if m_x_ > 0.0 else 0.0
    if m_y_ > 0.0:
        fano_y_ = var_y_ / m_y_
        cv_y_ = math.sqrt(var_y_) / m_y_
    else:
        fano_y_, cv_y_ = 1.0, math.inf
    return MomentReport(
        t=t, j=j, m_x=m_x_, m_y=m_y_, var_x=var_x_, var_y=var_y_, m2_y=m2_y_,
        m_xy=m_xy_, cov=cov_, corr=corr_, fano_x=fano_x_, fano_y=fano_y_,
        cv_x=cv_x_, cv_y=cv_y_, r_index=r_, corr_is_limit=corr_is_limit,
    )


def report_from_prop(rho: float, big_m_value: float, j: int, t: float) -> MomentReport:
    """Full moment report from the closed kernels at one cumulative intensity."""
    _check_j(j)
    if big_m_value == 0.0:
        return _assemble_report(
            t, j, float(j), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            -1.0 / math.sqrt(1.0 + rho), 1.0 - 1.0 / j, True,
        )
    m = big_m_value
    return _assemble_report(
        t, j,
        prop.mean_x_prop(rho, m, j),
        prop.mean_y_prop(rho, m, j),
        prop.var_x_prop(rho, m, j),
        prop.var_y_prop(rho, m, j),
        prop.m2_y_prop(rho, m, j),
        prop.mixed_moment_prop(rho, m, j),
        prop.cov_prop(rho, m, j),
        prop.corr_prop(rho, m, j),
        prop.r_index_prop(rho, m, j),
        False,
    )


def moment_report(rates: RateFamily, j: int, t: float, method: str = "auto") -> MomentReport:
    """Everything :class:`MomentReport` carries, via one consistent route."""
    _check_j(j)
    _check_time(t)
    how = _resolve(rates, method)
    if how == "closed":
        rho, base = rates.proportional_view()
        return report_from_prop(rho, base.big_m(t), j, t)
    if t == 0.0:
        return _assemble_report(
            t, j, float(j), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            _corr_zero_limit(rates), 1.0 - 1.0 / j, True,
        )
    mx, m2x, my, mxy, m2y = _ode_states(rates, j, t)
    vx = _clamp_var(m2x - mx * mx, m2x)
    vy = _clamp_var(m2y - my * my, m2y)
    cov = mxy - mx * my
    if vx > 0.0 and vy > 0.0:
        corr = cov / (math.sqrt(vx) * math.sqrt(vy))
        corr_is_limit = False
    else:
        corr = _corr_zero_limit(rates)
        corr_is_limit = True
    r_ = r_index(rates, j, t, method=how)
    return _assemble_report(t, j, mx, my, vx, vy, m2y, mxy, cov, corr, r_, corr_is_limit)


# ===== Crossing time ==========================================================


def crossing_time(rates: RateFamily, j: int) -> float | None:
    """First time with ``m_X(t) = m_Y(t)``, or None when no crossing exists.

    Requires a constant or proportional family.  The crossing condition is
    ``M(t) = -log(2 - rho)/(rho - 1)`` — independent of ``j`` (the argument is
    kept for interface symmetry).  There is no crossing when ``rho >= 2``.
    Non-invertible cumulative intensities are handled by root bracketing.
    """
    _check_j(j)
    view = rates.proportional_view()
    if view is None:
        raise DomainError("crossing time needs a constant or proportional family")
    rho, base = view
    m_thr = prop.crossing_m_threshold(rho)
    if math.isinf(m_thr):
        return None
    if isinstance(base, ConstantMu):
        return m_thr / base.mu
    t_hi = 1.0
    for _ in range(80):
        if base.big_m(t_hi) >= m_thr:
            break
        t_hi *= 2.0
        if t_hi > 1e18:
            return None  # cumulative intensity saturates below the threshold
    else:
        return None
    return float(
        brentq(lambda s: base.big_m(s) - m_thr, 0.0, t_hi, xtol=1e-12, rtol=8.9e-16)
    )
