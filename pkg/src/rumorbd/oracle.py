"""Brute-force verification oracle: dense integration of the master equation.

The forward (Kolmogorov) equations for the pair (X, Y) are integrated with
classical fixed-step RK4 on the truncated rectangle {0..n_max} x {0..k_max}.
Probability flux out of the rectangle — births attempted at n = n_max and
forgets attempted at k = k_max — is routed into a ``leaked_mass`` state
integrated alongside the table, so ``p.sum() + leaked_mass == 1`` holds to
machine precision at every step and the truncation error stays auditable
rather than silent.

The generator is stiff only through n_max, so the default step is
``min(0.01, 0.1 / (n_max * sup(lam + mu)))``, keeping the explicit scheme
well inside its stability region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NumericsError
from .homogeneous import _check_j, _check_time
from .rates import RateFamily


@dataclass(frozen=True)
class StepControl:
    """Fixed-step bounds: h = min(max_step, rate_budget / (n_max * sup rate))."""

    max_step: float = 0.01
    rate_budget: float = 0.1

    def __post_init__(self) -> None:
        if not (self.max_step > 0.0 and math.isfinite(self.max_step)):
            raise DomainError(f"max_step must be positive, got {self.max_step}")
        if not (self.rate_budget > 0.0 and math.isfinite(self.rate_budget)):
            raise DomainError(f"rate_budget must be positive, got {self.rate_budget}")


@dataclass(eq=False)
class TruncatedGrid:
    """Dense probability table p[n, k] at a single time, plus leaked mass."""

    p: np.ndarray
    j: int
    t: float
    n_max: int
    k_max: int
    leaked_mass: float

    def total_mass(self) -> float:
        return float(self.p.sum())

    def prob(self, n: int, k: int) -> float:
        if not (0 <= n <= self.n_max and 0 <= k <= self.k_max):
            raise DomainError(
                f"state ({n}, {k}) is outside the grid "
                f"[0..{self.n_max}] x [0..{self.k_max}]"
            )
        return float(self.p[n, k])


class GridMoments(NamedTuple):
    m_x: float
    m_y: float
    var_x: float
    var_y: float
    cov: float


def _flow(
    p: np.ndarray, lam: float, mu: float, nvec: np.ndarray
) -> tuple[np.ndarray, float]:
    """Master-equation derivative and instantaneous leak rate.

    Inflow to (n, k) comes from a spread at (n-1, k) and a forget at
    (n+1, k-1); outflow is n(lam+mu).  Mass pushed past n_max (spread in the
    top row) or past k_max (forget in the last column) is the leak.
    """
    ncol = nvec[:, None]
    dp = -(lam + mu) * ncol * p
    dp[1:, :] += lam * (ncol[:-1] * p[:-1, :])
    dp[:-1, 1:] += mu * (ncol[1:] * p[1:, :-1])
    leak = lam * nvec[-1] * float(p[-1, :].sum()) + mu * float(nvec[1:] @ p[1:, -1])
    return dp, leak


def solve_forward(
    rates: RateFamily,
    j: int,
    t: float,
    n_max: int,
    k_max: int,
    step_control: StepControl | None = None,
    *,
    max_leak: float = 1e-4,
) -> TruncatedGrid:
    """Integrate the truncated forward equations from (j, 0) up to time ``t``.

    Raises a numerics error when the accumulated leaked mass exceeds
    ``max_leak`` (enlarge the grid or shorten the horizon).  Note that mass
    which leaks at the n_max edge can never return to low-(n, k) states
    without pushing k past the states it left behind, so probabilities of
    individual small states remain accurate even when the total leak is
    sizeable; callers exploiting this may raise ``max_leak`` explicitly.
    """
    _check_j(j)
    _check_time(t)
    for name, v in (("n_max", n_max), ("k_max", k_max)):
        if not isinstance(v, int) or isinstance(v, bool) or v < j + 5:
            raise DomainError(f"{name} must be an integer >= j+5 = {j + 5}, got {v!r}")
    control = step_control if step_control is not None else StepControl()
    rates.validate_horizon(t)

    p = np.zeros((n_max + 1, k_max + 1), dtype=float)
    p[j, 0] = 1.0
    leak = 0.0
    if t > 0.0:
        sup_tot = rates.total_rate_sup(0.0, t)
        if not (math.isfinite(sup_tot) and sup_tot >= 0.0):
            raise DomainError(f"rate supremum over [0, {t}] must be finite, got {sup_tot}")
        if sup_tot > 0.0:
            h = min(control.max_step, control.rate_budget / (n_max * sup_tot))
        else:
            h = control.max_step
        steps = max(1, math.ceil(t / h))
        h = t / steps
        nvec = np.arange(n_max + 1, dtype=float)
        for i in range(steps):
            t0 = i * h
            tm = t0 + 0.5 * h
            t1 = t0 + h
            la0, mu0 = rates.lam_at(t0), rates.mu_at(t0)
            lam, mum = rates.lam_at(tm), rates.mu_at(tm)
            la1, mu1 = rates.lam_at(t1), rates.mu_at(t1)
            k1, l1 = _flow(p, la0, mu0, nvec)
            k2, l2 = _flow(p + (0.5 * h) * k1, lam, mum, nvec)
            k3, l3 = _flow(p + (0.5 * h) * k2, lam, mum, nvec)
            k4, l4 = _flow(p + h * k3, la1, mu1, nvec)
            p = p + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            leak += (h / 6.0) * (l1 + 2.0 * (l2 + l3) + l4)

    if not np.all(np.isfinite(p)) or not math.isfinite(leak):
        raise NumericsError(
            "forward integration produced non-finite probabilities; "
            "reduce the step bounds"
        )
    if leak > max_leak:
        raise NumericsError(
            f"probability leak {leak:.3e} exceeds max_leak={max_leak:.3e}; "
            "enlarge n_max/k_max or shorten the horizon"
        )
    return TruncatedGrid(p=p, j=j, t=t, n_max=n_max, k_max=k_max, leaked_mass=float(leak))


def moments_from_grid(grid: TruncatedGrid) -> GridMoments:
    """Expectations over the truncated table (left unnormalized on purpose).

    Requires leaked_mass <= 1e-6: beyond that the missing tail mass would
    contaminate the moments by more than the advertised accuracy.
    """
    if grid.leaked_mass > 1e-6:
        raise NumericsError(
            f"grid leaked {grid.leaked_mass:.3e} > 1e-6 of its mass; "
            "moments over the truncated table would be unreliable"
        )
    p = grid.p
    n = np.arange(grid.n_max + 1, dtype=float)
    k = np.arange(grid.k_max + 1, dtype=float)
    pn = p.sum(axis=1)
    pk = p.sum(axis=0)
    m_x = float(n @ pn)
    m_y = float(k @ pk)
    m2_x = float((n * n) @ pn)
    m2_y = float((k * k) @ pk)
    m_xy = float(n @ p @ k)
    return GridMoments(
        m_x=m_x,
        m_y=m_y,
        var_x=m2_x - m_x * m_x,
        var_y=m2_y - m_y * m_y,
        cov=m_xy - m_x * m_y,
    )
