"""
Checking a front against sticky particles
=========================================

An independent route to the same answer: fill the plane with a lattice of
particles, let them stream freely until they touch the tracked front, and
count what lands in each marker's bin.  Then test the weak form of the
mass and momentum equations with a smooth bump.
"""

import numpy as np

from pressureless import constant_state as cs, front, oracle

scen = cs.ConstantStateScenario(rho=1.0, rho_tilde=4.0, u=0.0, v=-1.0)
data = scen.data()
history = front.track(data, n_markers=32, dt=0.01, t_end=1.0, store_every=10)
last = history.last

result = oracle.sticky_run(data, history, h=last.dl / 4, t_max=1.0)
gap = oracle.bin_comparison(result, last)
print("worst bin mass gap:", np.max(np.abs(gap)))
print("mass in the lattice:", result.total_mass,
      "= free", np.sum(result.free()["m"]), "+ bins", np.sum(result.bin_mass))

bump = "(x+0.4)^2*(0.4-x)^2*(y+1.5)^2*(0.5-y)^2"
w = oracle.weak_residual(data, history, bump, bump, bump, 0.2, 1.0,
                         box=(-0.4, 0.4, -1.5, 0.5), n_cells=32)
print("weak defects (mass, x-momentum, y-momentum):", w.mass, w.mom_x, w.mom_y)
print("relative to the box mass:", max(abs(w.mass), abs(w.mom_y)) / w.box_mass)
