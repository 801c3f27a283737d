"""
How sliding an arm moves the centre of gravity
==============================================

Sliding the x arm carries its rod and rotors 1 and 3 along x. About a
quarter of the vehicle mass moves, so the CoG follows at roughly a quarter
of the arm travel and each rotor's lever arm changes unevenly.
"""

import numpy as np

from morphsim import MassModel, compute_inertia

model = MassModel()

print("  dx (m)   cog_x (m)   Jxx        Jyy        Jzz")
for dx in np.linspace(-model.d_max, model.d_max, 7):
    props = compute_inertia((dx, 0.0), model)
    J = props.inertia
    print(f"{dx:7.3f}  {props.cog[0]:9.5f}  {J[0, 0]:.6f}  {J[1, 1]:.6f}  {J[2, 2]:.6f}")

# Lever arms of rotors 1 and 3 about the shifted CoG. The difference of the
# two is what turns equal thrust into a pitching moment.
props = compute_inertia((0.05, 0.0), model)
r1, r3 = props.torque_arms[0, 0], props.torque_arms[2, 0]
print(f"\nat dx = 0.05 m: rotor 1 arm {r1:.4f} m, rotor 3 arm {r3:.4f} m")
thrust = model.total_mass * 9.81 / 4
print(f"pitch moment at hover thrust: {-thrust * props.torque_arms[:, 0].sum():.4f} N m")
