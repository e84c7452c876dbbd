"""
A stream hitting matter at rest
===============================

A constant stream (rho = 1, velocity (0, -1)) runs into resting matter of
density 4.  The front starts with line mass 1 moving at half the stream
speed.  Its speed fraction k_hat relaxes to sqrt(rho)/(sqrt(rho)+sqrt(rho~)),
here 1/3, and the line mass has a closed form.
"""

import numpy as np

from pressureless import constant_state as cs, front

scen = cs.ConstantStateScenario(rho=1.0, rho_tilde=4.0, u=0.0, v=-1.0, k_hat0=0.5, P0=1.0)
history = front.track(scen.data(), n_markers=16, dt=0.01, t_end=4.0, store_every=100)

for state in history.states:
    P, k = cs.closed_form_P(scen, state.l[0], state.t)
    k_num = cs.k_hat_of(state, scen.u, scen.v)[0]
    print(f"t={state.t:4.1f}  P={state.P[0]:.12f}  closed form {float(P):.12f}  "
          f"k_hat={k_num:.6f}")

print("kappa =", cs.kappa(scen.rho, scen.rho_tilde))

# a curved front keeps u J - v I fixed along every marker
curved = cs.ConstantStateScenario(rho=1.0, rho_tilde=4.0, u=0.0, v=-1.0,
                                  y0="0.05*sin(2*pi*l)")
history = front.track(curved.data(), n_markers=32, dt=0.01, t_end=0.5, store_every=10)
C, G = cs.first_integrals(history, curved.u, curved.v)
print("curved: drift of u J - v I", np.max(np.abs(C - C[:1])))
