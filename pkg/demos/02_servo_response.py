"""
Arm servo step response
=======================

The servo that drives each arm is a second-order lag plus a slew limit.
Below we compare the overshoot against the closed form for a few damping
ratios, then show how the 0.5 m/s slew limit stretches a full-travel move.
"""

import math

from morphsim.actuation import ServoParams, step_overshoot
from morphsim.validation import simulate_servo_step

for zeta in (0.5, 0.7, 1.0):
    _, x = simulate_servo_step(ServoParams(zeta=zeta, rate_max=math.inf))
    print(f"zeta {zeta}: simulated overshoot {x.max() / 0.1 - 1:+.4f}, closed form {step_overshoot(zeta):.4f}")

# With the slew limit active, a 0.14 m step takes at least 0.28 s.
for rate in (math.inf, 0.5):
    t, x = simulate_servo_step(ServoParams(rate_max=rate), step=0.14, duration=1.0)
    t90 = t[(x >= 0.9 * 0.14).argmax()]
    print(f"rate limit {rate} m/s: 90% rise time {t90:.3f} s")
