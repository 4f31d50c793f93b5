"""Reference table for the Bessel accuracy test.

Writes bessel_oracle.csv: order, argument (exact double as repr), J_m(x) and
J'_m(x) to 25 significant digits, evaluated with mpmath at 60 digits.
"""
import random

import mpmath

mpmath.mp.dps = 60
rng = random.Random(20240611)

rows = []
for i in range(10_000):
    m = rng.randint(-300, 300)
    if i % 4 == 0:
        x = 10 ** rng.uniform(-3, 1.3)  # series side and the switch region
    elif i % 4 == 1:
        x = abs(m) * rng.uniform(0.8, 1.2) + rng.uniform(0, 5)  # turning point
    else:
        x = rng.uniform(0, 5000)
    x = float(x)
    xm = mpmath.mpf(x)
    j = mpmath.besselj(m, xm)
    jp = (mpmath.besselj(m - 1, xm) - mpmath.besselj(m + 1, xm)) / 2
    rows.append(f"{m},{x!r},{mpmath.nstr(j, 25)},{mpmath.nstr(jp, 25)}")

with open("bessel_oracle.csv", "w") as fh:
    fh.write("m,x,j,jp\n")
    fh.write("\n".join(rows))
    fh.write("\n")
