"""
Independent checks of the model
===============================

Runs the same property checks as ``morphsim validate``: inertia against a
point-mass cloud, the mixer torque Jacobian, servo overshoot, hover trim,
arm-independence of translation and the RK4 convergence order.
"""

from morphsim.validation import run_checks

for check in run_checks():
    print(check.line())
