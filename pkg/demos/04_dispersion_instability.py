"""
Why the equal-density P equation cannot be integrated for long
==============================================================

Linearizing P'' = rho (C/P)_l about a uniform state gives lambda^2 = -i K xi,
so a mode of wavenumber xi grows like exp(sqrt(|K| xi / 2) t).  Finer grids
carry faster modes, and the growth has no upper bound.
"""

import numpy as np

from pressureless import dispersion as dp
from pressureless.errors import BlowUp

for row in dp.growth_table(1.0, [4.0, 16.0, 64.0, 256.0], t_max=8.0):
    print(f"xi={row.xi:6.0f}  predicted {row.predicted:8.4f}  measured {row.measured:8.4f}")

# the discrete problem: the fastest grid mode speeds up as the grid is refined
for n in (32, 64, 128):
    print(f"N={n:4d}  leapfrog max growth {dp.max_resolved_growth(1.0, 1.0, n, t_max=1.0):.3f}")

try:
    dp.measure_growth(1.0, 4096.0, t_max=16.0)
except BlowUp as exc:
    print("blow-up:", exc)
