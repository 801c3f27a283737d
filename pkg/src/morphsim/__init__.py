"""Simulation of a quadcopter that steers by sliding its rotor arms."""

from .actuation import ServoParams, saturate_command, servo_derivative
from .control import CascadedController, ControlCommand, ControllerGains, Mode, PidGains
from .dynamics import G, Plant, RigidBodyState, RotorSet, state_derivative
from .morphology import MassModel, MassProperties, MorphState, compute_cog, compute_inertia
from .simulation import FigureEight, SimConfig, SimulationAbort, Telemetry, Waypoints, run_mission

__version__ = "0.1.0"
