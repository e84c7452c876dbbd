"""Shock-front laboratory for two-dimensional pressureless gas dynamics.

Modules:

- ``fieldexpr``: parse, evaluate and differentiate field expressions
- ``scenario``: two-sided initial data across a curve and its admissibility
- ``characteristics``: free streaming, pre-images, absorption by the front
- ``front``: Lagrangian front tracking with accumulated mass and momentum
- ``variational``: Hopf-Lax minimization and comparison with tracked fronts
- ``constant_state``: closed forms for a constant external state
- ``dispersion``: mode growth of the model equation ``P_tt = K P_x``
- ``oracle``: sticky-particle and weak-form cross-checks
- ``cli``, ``config``, ``acceptance``: experiment driver
"""

__version__ = "0.1.0"
