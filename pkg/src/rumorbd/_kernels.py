"""Stable scalar kernels for the closed-form moment machinery.

Every closed-form moment of the time-changed process can be written in terms of
``x = (rho - 1) * M`` and four entire functions of ``x``::

    f1(x) = (e^x - 1) / x                 = sum_{m>=0} x^m / (m+1)!
    f2(x) = (e^x - 1 - x) / x^2           = sum_{m>=0} x^m / (m+2)!
    g4(x) = (e^x - 1)^2 / (2 x^2)         = sum_{m>=0} (2^{m+1}-1) x^m / (m+2)!
    h3(x) = (e^{2x} - 1 - 2x e^x)/(2 x^3) = sum_{m>=0} [2^{m+2}/(m+3)! - 1/(m+2)!] x^m

with removable singularities at 0: ``f1(0)=1``, ``f2(0)=1/2``, ``g4(0)=1/2``,
``h3(0)=1/6``.  The integrated building blocks are then::

    G1 = M f1(x)        # int mu eta
    G2 = rho M^2 f2(x)  # int mu eta phi_x
    G3 = rho M^3 h3(x)  # int mu eta G2
    G4 = M^2 g4(x)      # int mu eta G1

so the critical balance point ``rho = 1`` (``x = 0``) needs no special-casing
anywhere downstream.  Each kernel has a log-domain companion, used when
``e^x`` would overflow the float range.
"""

from __future__ import annotations

import math

_LN2 = math.log(2.0)

# expm1 overflows (raises OverflowError in the math module) beyond ~709.78.
_X_OVERFLOW = 709.0

# Maclaurin series are used inside this radius; ~30 terms reach machine
# precision at the boundary, and the closed forms lose no digits outside it.
_SERIES_RADIUS = 0.5
_SERIES_TERMS = 34


def f1(x: float) -> float:
    """(e^x - 1)/x with the removable singularity filled in."""
    if x == 0.0:
        return 1.0
    if x > _X_OVERFLOW:
        return math.inf
    return math.expm1(x) / x


def f2(x: float) -> float:
    """(e^x - 1 - x)/x^2, the second exponential remainder."""
    if abs(x) <= _SERIES_RADIUS:
        # sum x^m / (m+2)!, accumulated highest order first
        acc = 0.0
        for m in range(_SERIES_TERMS, -1, -1):
            acc = acc * x + 1.0 / math.factorial(m + 2)
        return acc
    if x > _X_OVERFLOW:
        return math.inf
    return (math.expm1(x) - x) / (x * x)


def g4(x: float) -> float:
    """(e^x - 1)^2 / (2 x^2) == f1(x)^2 / 2."""
    v = f1(x)
    return 0.5 * v * v


def h3(x: float) -> float:
    """(e^{2x} - 1 - 2x e^x) / (2 x^3)."""
    if abs(x) <= _SERIES_RADIUS:
        # coefficient 2^{m+2}/(m+3)! - 1/(m+2)! == (2^{m+2} - (m+3))/(m+3)!
        acc = 0.0
        for m in range(_SERIES_TERMS, -1, -1):
            acc = acc * x + (2.0 ** (m + 2) - (m + 3)) / math.factorial(m + 3)
        return acc
    if 2.0 * x > _X_OVERFLOW:
        return math.inf
    return (math.expm1(2.0 * x) / (2.0 * x) - math.exp(x)) / (x * x)


# ===== Log-domain companions ==================================================
# Valid for x > 0; exact rearrangements, no asymptotic truncation.


def log_f1(x: float) -> float:
    """log f1(x) for x > 0."""
    if x <= 0.0:
        raise ValueError("log_f1 requires x > 0")
    return x + math.log1p(-math.exp(-x)) - math.log(x)


def log_f2(x: float) -> float:
    """log f2(x) for x > 0."""
    if x <= 0.0:
        raise ValueError("log_f2 requires x > 0")
    if x <= 40.0:
        return math.log(f2(x))
    # e^x - 1 - x = e^x (1 - (1+x) e^{-x}); the correction is < 2^-53 for x > 40
    return x + math.log1p(-(1.0 + x) * math.exp(-x)) - 2.0 * math.log(x)


def log_g4(x: float) -> float:
    """log g4(x) for x > 0."""
    return 2.0 * log_f1(x) - _LN2


def log_h3(x: float) -> float:
    """log h3(x) for x > 0."""
    if x <= 0.0:
        raise ValueError("log_h3 requires x > 0")
    if x <= 45.0:
        return math.log(h3(x))
    # e^{2x} - 1 - 2x e^x = e^{2x} (1 - e^{-2x} - 2x e^{-x})
    return (
        2.0 * x
        + math.log1p(-math.exp(-2.0 * x) - 2.0 * x * math.exp(-x))
        - _LN2
        - 3.0 * math.log(x)
    )


# ===== Ratio kernel for the dispersion index ==================================


def one_minus_q_over_x(x: float) -> float:
    """(1 - x/(e^x - 1)) / x, the kernel of the dispersion-index formula.

    Entire in x with value 1/2 at 0; equals f2(x)/f1(x).  Computed via a short
    Bernoulli-style series near 0 (the direct form loses all digits there) and
    directly elsewhere, with an underflow-safe tail for huge x.
    """
    ax = abs(x)
    if ax <= 1e-3:
        # 1/2 - x/12 + x^3/720 - x^5/30240 ...
        return 0.5 - x / 12.0 + x**3 / 720.0
    if x >= _X_OVERFLOW:
        q = x * math.exp(-x) if x < 745.0 else 0.0
        return (1.0 - q) / x
    q = x / math.expm1(x)
    return (1.0 - q) / x
