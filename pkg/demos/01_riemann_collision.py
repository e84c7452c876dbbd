"""
Two colliding streams
=====================

Two equal streams of dust hit each other head on along the line y = 0.
Everything that arrives sticks, so the front stays put and its line mass
grows like 2 rho w t.  With unequal densities the front drifts at the
sqrt(rho)-weighted mean of the two velocities.
"""

import numpy as np

from pressureless import front, scenario
from pressureless.scenario import Curve, InitialData

data = scenario.riemann(rho=1.0, w=1.0)
history = front.track(data, n_markers=16, dt=0.05, t_end=1.0)
last = history.last
print("symmetric: y range", last.y.min(), last.y.max())
print("symmetric: P(1) =", last.P[0], "(expected 2)")

# a denser stream from below pushes the front upward
curve = Curve("l", "0", -0.5, 0.5, topology="periodic", shift=(1.0, 0.0))
uneven = InitialData.from_expressions(1.0, 0.0, -1.0, 4.0, 0.0, 1.0,
                                      level_set="-b", curve=curve)
history = front.track(uneven, n_markers=16, dt=0.05, t_end=1.0)
V = (np.sqrt(1.0) * -1.0 + np.sqrt(4.0) * 1.0) / 3.0
print("uneven: front height", history.last.y[0], "(sticky speed", V, ")")

# the concentration identity: absorbed matter, streamed freely, lands on the front
rx, ry = front.adhesion_residual(uneven, history)
print("uneven: adhesion residual", np.max(np.abs(rx)), np.max(np.abs(ry)))
