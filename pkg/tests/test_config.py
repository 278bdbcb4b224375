import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hotloop.config import (
    PlantConfig,
    config_hash,
    from_dict,
    load_config,
    save_config,
    to_dict,
    with_overrides,
)
from hotloop.errors import ParseError, ValidationError, VersionError


def test_empty_document_gives_defaults():
    assert load_config(b"") == PlantConfig()
    assert load_config("  \n") == PlantConfig()
    assert load_config(b"{}") == PlantConfig()


def test_tank_mass_bounds():
    assert load_config(b'{"tank": {"mass": 800}}').tank.mass == 800.0
    with pytest.raises(ValidationError) as exc:
        load_config(b'{"tank": {"mass": -1}}')
    assert exc.value.path == "tank.mass"
    assert "tank.mass" in str(exc.value)


def test_errors_name_the_field():
    with pytest.raises(ValidationError, match="circuits.rack_flow"):
        load_config(b'{"circuits": {"rack_flow": -2.0}}')
    with pytest.raises(ValidationError, match="chiller.colour"):
        load_config(b'{"chiller": {"colour": "red"}}')
    with pytest.raises(ValidationError, match="site.support_threshold"):
        load_config(b'{"site": {"support_threshold": 5}}')
    with pytest.raises(ValidationError, match=r"chiller.cop_curve\[1\]"):
        load_config(b'{"chiller": {"cop_curve": [[55, 0.3], [60]]}}')
    with pytest.raises(ValidationError, match="cluster.n_nodes"):
        load_config(b'{"cluster": {"n_nodes": 0}}')


def test_parse_and_version_errors():
    with pytest.raises(ParseError):
        load_config(b"{not json")
    with pytest.raises(ParseError):
        load_config(b"\xff\xfe")
    with pytest.raises(VersionError):
        load_config(b'{"schema_version": 99}')


def test_two_point_curve_round_trip():
    doc = {"chiller": {"cop_curve": [[55.0, 0.3], [80.0, 0.6]]}}
    cfg = from_dict(doc)
    assert cfg.chiller.cop_curve == ((55.0, 0.3), (80.0, 0.6))
    text = save_config(cfg)
    again = load_config(text.encode())
    assert again == cfg
    assert save_config(again) == text


def test_overrides():
    cfg = with_overrides(PlantConfig(), {"chiller.capacity_scale": "0.2", "seed": 5})
    assert cfg.chiller.capacity_scale == 0.2 and cfg.seed == 5
    with pytest.raises(ValidationError):
        with_overrides(PlantConfig(), {"chiller.nope": 1})
    with pytest.raises(ValidationError):
        with_overrides(PlantConfig(), {"circuits.rack_flow": "-1"})


def test_hash_tracks_content():
    a = config_hash(PlantConfig())
    assert a == config_hash(load_config(save_config(PlantConfig())))
    assert a != config_hash(with_overrides(PlantConfig(), {"seed": 1}))


@settings(max_examples=40)
@given(
    seed=st.integers(0, 2**31),
    mass=st.floats(1.0, 5000.0),
    flow=st.floats(0.1, 10.0),
    standby=st.floats(40.0, 70.0),
    topo=st.sampled_from(["tichelmann", "naive"]),
    enabled=st.booleans(),
)
def test_round_trip_property(seed, mass, flow, standby, topo, enabled):
    cfg = from_dict({
        "seed": seed,
        "tank": {"mass": mass},
        "circuits": {"drive_flow": flow},
        "chiller": {"standby_temp": standby, "enabled": enabled},
        "manifold": {"topology": topo},
    })
    assert load_config(save_config(cfg)) == cfg
    assert json.loads(save_config(cfg)) == to_dict(cfg)
