"""Scalar special-function kernel used by the closed-form rate expressions.

Everything in the analytical layer reduces to the exponential integral Ei
on the real axis and to the kernel family

    xi_n(x, y) = integral_0^inf e^{-x t} (t + y)^{-n} dt,

whose closed form mixes Gamma factors with e^{x y} Ei(-x y).  All functions
here are pure and stateless, so they are safe to call from any number of
concurrent contexts.
"""

import math
import operator
from math import exp, fsum, lgamma, log

import numpy as np
from scipy import integrate

EULER_GAMMA = 0.5772156649015328606065

# Positive axis: convergent power series below, asymptotic expansion above.
_EI_SERIES_MAX = 40.0
# Negative axis: the alternating series loses ~e^|t| to cancellation, so the
# continued fraction takes over early.
_E1_SERIES_MAX = 1.0
_CF_MAX_ITER = 1000
_TINY = 1e-300

# Estimated relative cancellation in the xi_n closed form beyond which the
# defining integral is used instead.
_XI_CANCEL_LIMIT = 1e-9
_EPS4 = 4.0 * float(np.finfo(float).eps)


def _e1_series(x):
    """E1(x) by the alternating power series; meant for 0 < x <= 1."""
    acc = [-EULER_GAMMA, -log(x)]
    term = 1.0
    for k in range(1, 80):
        term *= -x / k
        acc.append(-term / k)
        if abs(term) < 1e-20:
            break
    return fsum(acc)


def _e1_cf_scaled(x):
    """e^x E1(x) by modified-Lentz continued fraction; accurate for x >= ~0.7.

    The scaled product never forms an exponential, so it cannot overflow or
    underflow no matter how large x gets.
    """
    f = _TINY
    c = f
    d = 0.0
    for i in range(1, _CF_MAX_ITER + 1):
        a = 1.0 if i == 1 else -float(i - 1) ** 2
        b = x + 2.0 * i - 1.0
        d = b + a * d
        if d == 0.0:
            d = _TINY
        c = b + a / c
        if c == 0.0:
            c = _TINY
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            return f
    raise ArithmeticError(f"continued fraction for e^x E1(x) stalled at x={x!r}")


def _e1_scaled(x):
    """e^x E1(x) for x > 0."""
    if x <= _E1_SERIES_MAX:
        return exp(x) * _e1_series(x)
    return _e1_cf_scaled(x)


def exp_integral_ei(t):
    """Exponential integral Ei(t) for real nonzero t.

    Series / continued-fraction / asymptotic evaluation with relative error
    below 1e-12 over the representable range.  Values overflow to +inf past
    t ~ 709.7 (the IEEE double limit), and relative accuracy necessarily
    degrades in the immediate vicinity of Ei's positive real zero near
    t = 0.3725, where the value itself vanishes.
    """
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"Ei requires a finite argument, got {t!r}")
    if t == 0.0:
        raise ValueError("Ei has a logarithmic singularity at t = 0")
    if t < 0.0:
        x = -t
        if x <= _E1_SERIES_MAX:
            return -_e1_series(x)
        return -exp(-x) * _e1_cf_scaled(x)
    if t <= _EI_SERIES_MAX:
        acc = [EULER_GAMMA, log(t)]
        rough = acc[0] + acc[1]
        term = 1.0
        for k in range(1, 250):
            term *= t / k
            contrib = term / k
            acc.append(contrib)
            rough += contrib
            if contrib <= 1e-22 * max(1.0, abs(rough)):
                break
        return fsum(acc)
    if t > 709.0:
        return math.inf
    # Asymptotic expansion e^t/t * sum_k k!/t^k, truncated at its smallest term.
    s = 1.0
    term = 1.0
    k = 1
    while True:
        nxt = term * k / t
        if nxt >= term:
            break
        term = nxt
        s += term
        k += 1
        if term < 1e-17 * s:
            break
    return exp(t) / t * s


def xi_n(n, x, y):
    """Kernel xi_n(x, y) = integral_0^inf e^{-x t} (t + y)^{-n} dt.

    Requires integer n >= 1 and x, y > 0.  Evaluated through the closed form

        (-x)^{n-1}/Gamma(n) * ( sum_{k=1}^{n-1} Gamma(k) (-x)^{-k} y^{-k}
                                - e^{x y} Ei(-x y) ),

    with the finite sum accumulated exactly (fsum) and e^{xy} Ei(-xy) taken
    in scaled form so it cannot overflow.  The alternating terms cancel
    catastrophically once n and x*y grow together; whenever the estimated
    cancellation exceeds 1e-9 of the result, the value is recomputed by
    adaptive quadrature of the defining integral.
    """
    n = operator.index(n)
    if n < 1:
        raise ValueError(f"xi_n requires n >= 1, got {n}")
    x = float(x)
    y = float(y)
    if not (math.isfinite(x) and x > 0.0):
        raise ValueError(f"xi_n requires x > 0, got {x!r}")
    if not (math.isfinite(y) and y > 0.0):
        raise ValueError(f"xi_n requires y > 0, got {y!r}")
    if not math.isfinite(x * y):
        raise ValueError("x * y is not representable")

    lg_n = lgamma(n)
    log_x = log(x)
    log_y = log(y)
    exponents = [lgamma(k) - lg_n + (n - 1 - k) * log_x - k * log_y for k in range(1, n)]
    lead_exponent = (n - 1) * log_x - lg_n
    if any(e > 700.0 for e in exponents) or lead_exponent > 700.0:
        return _xi_quadrature(n, x, y)

    terms = []
    for k, e in enumerate(exponents, start=1):
        sign = -1.0 if (n - 1 - k) % 2 else 1.0
        terms.append(sign * exp(e))
    # -(−x)^{n−1} e^{xy} Ei(−xy) / Gamma(n)  ==  (−1)^{n−1} x^{n−1} e^{xy} E1(xy) / Gamma(n)
    lead_sign = -1.0 if (n - 1) % 2 else 1.0
    terms.append(lead_sign * exp(lead_exponent) * _e1_scaled(x * y))

    total = fsum(terms)
    gross = fsum(abs(v) for v in terms)
    if total <= 0.0 or _EPS4 * gross > _XI_CANCEL_LIMIT * total:
        return _xi_quadrature(n, x, y)
    return total


def _xi_quadrature(n, x, y):
    """Defining integral of xi_n by adaptive quadrature after u = x t."""
    inv_x = 1.0 / x

    def f(u):
        return exp(-u) * (u * inv_x + y) ** (-n) * inv_x

    val, err = integrate.quad(f, 0.0, np.inf, epsabs=0.0, epsrel=1e-11, limit=400)
    if not (val > 0.0) or err > 1e-9 * val:
        raise ArithmeticError(
            f"quadrature for xi_n(n={n}, x={x!r}, y={y!r}) achieved only {err!r}"
        )
    return val


def harmonic_number(k):
    """K-th harmonic number sum_{j=1}^{K} 1/j by direct summation.

    Supported up to K = 1e7; larger arguments are refused rather than
    silently switching to an asymptotic shortcut.
    """
    k = operator.index(k)
    if k < 1:
        raise ValueError(f"harmonic_number requires K >= 1, got {k}")
    if k > 10_000_000:
        raise ValueError("direct summation is supported up to K = 1e7")
    return fsum(1.0 / j for j in range(1, k + 1))
