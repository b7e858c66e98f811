#!/usr/bin/env python3
"""Walk through the scalar kernel that powers every closed-form rate.

The star of the analytical layer is

    xi_n(x, y) = integral_0^inf e^{-x t} (t + y)^{-n} dt,

evaluated through a Gamma/exponential-integral closed form with an
automatic quadrature fallback when the alternating terms cancel too hard.
This script shows the identity xi_1(x,1) = -e^x Ei(-x), compares the kernel
against direct quadrature, and pokes the cancellation cliff.
"""

import numpy as np
from scipy import integrate

from fdsched import exp_integral_ei, harmonic_number, xi_n

print("=== exponential integral on the negative axis ===")
for t in (0.1, 1.0, 10.0, 40.0):
    print(f"  Ei(-{t:5.1f}) = {exp_integral_ei(-t): .15e}")

print("\n=== xi_1(x, 1) equals -e^x Ei(-x) ===")
for x in (0.1, 1.0, 10.0):
    lhs = xi_n(1, x, 1.0)
    rhs = -np.exp(x) * exp_integral_ei(-x)
    print(f"  x={x:5.1f}: xi_1={lhs:.15f}   -e^x Ei(-x)={rhs:.15f}")

print("\n=== kernel vs direct quadrature ===")
for (n, x, y) in [(1, 1.0, 1.0), (3, 2.0, 0.5), (8, 0.3, 1.0), (15, 10.0, 10.0)]:
    ref, _ = integrate.quad(lambda t: np.exp(-x * t) * (t + y) ** (-n), 0, np.inf)
    got = xi_n(n, x, y)
    print(f"  n={n:2d} x={x:5.2f} y={y:5.2f}:  xi={got: .12e}  quad={ref: .12e}  "
          f"rel={abs(got - ref) / ref:.1e}")
print("  (n=15, x=y=10 is the cancellation cliff: the closed form alone would")
print("   return garbage ~1e-16 off by a sign; the kernel reroutes to quadrature)")

print("\n=== harmonic numbers approach log K + gamma from above ===")
for k in (16, 256, 4096):
    gap = harmonic_number(k) - (np.log(k) + 0.5772156649015329)
    print(f"  K={k:5d}: H_K - (log K + gamma) = {gap:.3e}")
