import pytest

from heatdiode.config import (
    ConfigError,
    baths_from_config,
    chain_from_config,
    check_config,
    effective_from_config,
    fk_from_config,
    load_config,
    md_from_config,
    quad_from_config,
)

TOML = """
[chain]
springs = [2, 2, 1, 1, 0.1, 0.1]

[baths]
frictions = [1, 1, 0, 1, 1]
temperatures = [1, 0.5, 0, 0.2, 0.1]
hot = [1, 2]
cold = [4, 5]

[quadrature]
points = 1001
scheme = "adaptive"

[md]
dt = 0.01
measure_bond = [3, 4]

[fk]
amplitudes = [0, 0, 1, 1, 1]
form = "normalized"

[effective]
base_frictions = [1, 0, 0, 0, 0.5]
slope = 0.05
t_hot = 1.2
t_cold = 1.0
"""


@pytest.fixture
def cfg(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text(TOML)
    return load_config(path)


def test_builders_translate_one_based_labels(cfg):
    chain = chain_from_config(cfg)
    baths = baths_from_config(cfg)
    assert chain.n == 5 and chain.springs[0] == 2.0
    assert baths.hot_set == (0, 1) and baths.cold_set == (3, 4)
    assert md_from_config(cfg).measure_bond == (2, 3)
    assert md_from_config(cfg, seed=9).base_seed == 9
    assert quad_from_config(cfg).points == 1001 and quad_from_config(cfg).scheme == "adaptive"
    assert fk_from_config(cfg).form == "normalized"
    eff, th, tc = effective_from_config(cfg)
    assert eff.slope == 0.05 and (th, tc) == (1.2, 1.0)


def test_defaults_when_sections_missing():
    assert fk_from_config({}) is None
    assert quad_from_config({}).points == 200_001
    with pytest.raises(ConfigError, match=r"\[chain\]"):
        chain_from_config({})


@pytest.mark.parametrize(
    "bad, match",
    [
        ({"chains": {}}, "unknown config section"),
        ({"chain": {"springs": [1, 1], "mass": [1]}}, "unknown keys"),
        ({"chain": [1, 2]}, "must be a table"),
    ],
)
def test_schema_rejects_unknown_entries(bad, match):
    with pytest.raises(ConfigError, match=match):
        check_config(bad)


def test_incomplete_sections():
    with pytest.raises(ConfigError, match="missing"):
        baths_from_config({"baths": {"frictions": [1]}})
    with pytest.raises(ConfigError, match="md"):
        md_from_config({"md": {"dt": -1}})
    with pytest.raises(ConfigError, match="fk"):
        fk_from_config({"fk": {"period": 1.0}})


def test_unreadable_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("[chain\nsprings = ")
    with pytest.raises(ConfigError, match="malformed"):
        load_config(bad)
