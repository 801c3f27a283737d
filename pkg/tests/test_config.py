import json

import pytest

from morphsim.config import ConfigError, config_from_dict, default_config_dict, load_config
from morphsim.control import ControllerGains, Mode
from morphsim.morphology import MassModel
from morphsim.simulation import FigureEight, SimConfig


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("")
    sim, model, gains = load_config(path)
    assert sim == SimConfig()
    assert model == MassModel()
    assert gains == ControllerGains()


def test_default_dict_round_trips():
    data = json.loads(json.dumps(default_config_dict()))
    sim, model, gains = config_from_dict(data)
    assert sim == SimConfig() and model == MassModel() and gains == ControllerGains()


def test_mass_sum_error_names_section():
    with pytest.raises(ConfigError) as info:
        config_from_dict({"mass_model": {"body_mass": 0.9}})
    keys = [k for k, _ in info.value.problems]
    assert keys == ["mass_model"]
    assert "sum to" in str(info.value)


def test_controller_rate_divisibility():
    with pytest.raises(ConfigError) as info:
        config_from_dict({"controller_hz": 300})
    assert info.value.problems[0][0] == "controller_hz"
    assert "integer multiple" in info.value.problems[0][1]


def test_all_problems_reported():
    with pytest.raises(ConfigError) as info:
        config_from_dict({"mode": "hybrid", "servo": {"zeta": 3.0}, "bogus": 1})
    keys = {k for k, _ in info.value.problems}
    assert keys == {"<root>", "mode", "servo"}


def test_parse_error_has_line_context(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "mode": "sliding",\n  "seed": ,\n}\n')
    with pytest.raises(ConfigError) as info:
        load_config(path)
    msg = str(info.value)
    assert "line 3" in msg and '"seed": ,' in msg


def test_overrides_apply(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(
        json.dumps(
            {
                "mode": "SlidingArmOnly",
                "seed": 9,
                "noise_deg": 2.0,
                "mission": "figure8",
                "figure8": {"amplitude_x": 1.5},
                "gains": {"l_theta": [0.1, 0.0, 0.03]},
            }
        )
    )
    sim, _, gains = load_config(path)
    assert sim.mode is Mode.SLIDING and sim.rng_seed == 9 and sim.noise_deg == 2.0
    assert sim.mission == FigureEight(amplitude_x=1.5)
    assert (gains.l_theta.kp, gains.l_theta.ki, gains.l_theta.kd) == (0.1, 0.0, 0.03)
    assert gains.l_theta.i_limit == ControllerGains().l_theta.i_limit


def test_mission_argument_overrides_file():
    sim, _, _ = config_from_dict({"mission": "waypoint"}, mission="figure8")
    assert sim.mission.kind == "figure8"


def test_servo_travel_cannot_exceed_frame():
    with pytest.raises(ConfigError) as info:
        config_from_dict({"servo": {"d_max": 0.2}})
    assert info.value.problems[0][0] == "servo.d_max"
