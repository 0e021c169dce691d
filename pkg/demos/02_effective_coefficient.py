"""The homogenized quadratic coefficient of a general nonlinearity.

beta(F) = E[F(X)(X^2-1)]/2 with X standard Gaussian, which equals
E[F'']/2 without differentiating F.  The battery spans smooth, kinked and
odd members; odd parts never contribute.

Run:  python demos/02_effective_coefficient.py
"""

import numpy as np

from kpzlab import BATTERY, effective_beta, gaussian_l2_check, hermite_coefficients

print(f"{'name':>18} {'beta':>12} {'known':>12} {'||F||':>8} {'||F_prime||':>11} {'L2 ok':>6}")
for name, F in BATTERY.items():
    quad = 200_000 if name == "abs" else 8192
    beta = effective_beta(F, quad_order=quad, check=False)
    rep = gaussian_l2_check(F)
    known = "-" if F.known_beta is None else f"{F.known_beta:.8f}"
    print(f"{name:>18} {beta:>12.8f} {known:>12} {rep.norm_f:>8.4f} "
          f"{rep.norm_f_prime:>11.4f} {str(rep.passed):>6}")

print("\nHermite ladder of x^2 + 0.1 x^3 (c_2 is the effective coefficient):")
exp = hermite_coefficients(BATTERY["square_plus_cubic"], 6)
for m, c in enumerate(exp.coeffs):
    print(f"  c_{m} = {c:+.6f}")
print(f"  tail (unexplained L2 mass): {exp.tail_norm_sq:.2e}")

print("\nadding an odd function moves beta by:",
      abs(effective_beta(BATTERY['square_plus_cubic']) - effective_beta(BATTERY['square'])))
