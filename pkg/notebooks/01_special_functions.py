"""Special functions: gamma family, confluent hypergeometric and Whittaker functions.

Run as a script or step through the ``# %%`` cells in an editor.
"""

# %% Gamma, digamma and trigamma at complex arguments
import math

import numpy as np

from spec2d.specfun import EULER_GAMMA, digamma, kummer_m, log_gamma, trigamma, tricomi_u, whittaker_m, whittaker_w

print("log Gamma(1/2)  =", log_gamma(0.5), " vs ln sqrt(pi) =", 0.5 * math.log(math.pi))
print("Psi(1)          =", digamma(1.0), " vs -gamma =", -EULER_GAMMA)
print("Psi(i/2)        =", digamma(0.5j))
print("Psi'(1/2)       =", trigamma(0.5), " vs pi^2/2 =", math.pi ** 2 / 2)

# %% Kummer M and Tricomi U: closed forms and the Kummer Wronskian
print("M(a, a, z) = e^z:", kummer_m(0.7, 0.7, 1.3), math.exp(1.3))
a, b, z = 0.4, 1.7, 6.0
M, Mp = kummer_m(a, b, z), a / b * kummer_m(a + 1, b + 1, z)
U, Up = tricomi_u(a, b, z), -a * tricomi_u(a + 1, b + 1, z)
print("Wronskian M U' - M' U =", M * Up - Mp * U, " expected", -math.gamma(b) * z ** -b * math.exp(z) / math.gamma(a))

# %% Whittaker functions across the series/asymptotic switch at |z| = 30
for zz in (5.0, 29.0, 31.0, 60.0):
    print(f"z = {zz:5.1f}  M_(0.3,0.2) = {whittaker_m(0.3, 0.2, zz).real:.6e}  W_(0.3,0.2) = {whittaker_w(0.3, 0.2, zz).real:.6e}")

# %% Terminating case: W reduces to a polynomial times e^{-z/2}
zs = np.array([0.5, 2.0, 7.0])
print(whittaker_w(1.5, 0.0, zs), np.exp(-zs / 2) * np.sqrt(zs) * (zs - 1))
