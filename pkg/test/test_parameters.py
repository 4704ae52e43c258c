import json

import pytest

from pilotsic import parameters
from pilotsic.parameters import *


def test_defaults():
    config = init_config()
    assert config.K    == 100
    assert config.tau  == 5
    assert config.beta == 24
    assert config.p_a  == 0.125
    assert config.L    == 1000
    assert config.sigma_n2 == 0.1
    assert config.n_scatterers == 20
    assert config.channel_backend   == ChannelBackend.CLARKE
    assert config.cancellation_mode == CancellationMode.SOFT


BETA_CASES = [
    (100, 5, 24),
    (50 , 5, 12),
    (200, 5, 48),
    (400, 5, 96),
    (1  , 5, 1),
    (3  , 2, 2),
]


@pytest.mark.parametrize("K, tau, expected", BETA_CASES)
def test_default_beta(K, tau, expected):
    assert default_beta(K, tau) == expected


def test_init_config_explicit_fields():
    config = init_config(K=10, tau=2, beta=3, p_a=0.5, M=8)
    assert config.beta == 3
    assert config.p_a  == 0.5
    assert config.M    == 8


def test_init_config_pa_capped():
    config = init_config(K=3, tau=5)
    assert config.p_a == 1.0


INVALID_FIELDS = [
    {'K'  : 0},
    {'M'  : 0},
    {'tau': 0},
    {'p_a': 1.5},
    {'sigma_n2': -0.1},
    {'L'  : 0},
    {'slot_s': 0.0},
    {'n_scatterers': 0},
    {'seed': -1},
]


@pytest.mark.parametrize("kwargs", INVALID_FIELDS)
def test_invalid_config(kwargs):
    try:
        init_config(**kwargs)
        assert False, "expected ConfigError"
    except ConfigError as err:
        field_name = list(kwargs)[0]
        assert field_name in str(err)


def test_config_error_is_value_error():
    assert issubclass(ConfigError, ValueError)


def test_config_dict_roundtrip():
    config = init_config(K=50, channel_backend=ChannelBackend.ORTHO_IDEAL, seed=7)
    data   = config_to_dict(config)
    assert data['channel_backend'] == "ortho_ideal"
    assert json.loads(json.dumps(data)) == data
    assert config_from_dict(data) == config


def test_config_from_dict_derives_beta():
    config = config_from_dict({'K': 50, 'tau': 5})
    assert config.beta == 12


def test_config_from_dict_unknown_key():
    try:
        config_from_dict({'K': 50, 'num_users': 50})
        assert False, "expected ConfigError"
    except ConfigError as err:
        assert "num_users" in str(err)


def test_config_from_dict_bad_enum():
    try:
        config_from_dict({'channel_backend': "jakes"})
        assert False, "expected ConfigError"
    except ConfigError as err:
        assert "channel_backend" in str(err)


def test_load_config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({'K': 20, 'M': 30, 'cancellation_mode': "hard"}))
    config = load_config(path)
    assert config.K == 20
    assert config.M == 30
    assert config.beta == default_beta(20, 5)
    assert config.cancellation_mode == CancellationMode.HARD


def test_load_config_invalid_json(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{K: 20")
    try:
        load_config(path)
        assert False, "expected ConfigError"
    except ConfigError:
        pass


def test_parse_overrides():
    parsed = parse_overrides(["K=50", "p_a = 0.2", "channel_backend=IID_RAYLEIGH"])
    assert parsed == {'K': 50, 'p_a': 0.2, 'channel_backend': ChannelBackend.IID_RAYLEIGH}


@pytest.mark.parametrize("override", ["K", "users=5", "K=abc", "K=2.5"])
def test_parse_overrides_invalid(override):
    try:
        parse_overrides([override])
        assert False, "expected ConfigError"
    except ConfigError:
        pass


def test_apply_overrides_rederives_beta():
    config = init_config()
    assert apply_overrides(config, ["K=50"]).beta == 12
    assert apply_overrides(config, ["K=50", "beta=7"]).beta == 7
    assert apply_overrides(config, ["M=400"]).beta == 24


def test_apply_overrides_validates():
    try:
        apply_overrides(init_config(), ["p_a=2"])
        assert False, "expected ConfigError"
    except ConfigError as err:
        assert "p_a" in str(err)


def test_env_defaults_are_positive():
    assert parameters.DEFAULT_M >= 1
    assert parameters.DEFAULT_WORKERS >= 1
    assert parameters.DEFAULT_TRIALS >= 1


def test_apply_overrides_rederives_p_a():
    config = apply_overrides(init_config(), ["K=400"])
    assert config.beta == 96
    assert config.p_a == init_config(K=400).p_a == 0.03125
    assert config.p_a * config.K / config.tau == parameters.DEFAULT_AVG_DEGREE

    assert apply_overrides(init_config(), ["tau=10"]).p_a == 0.25
    assert apply_overrides(init_config(), ["K=400", "p_a=0.5"]).p_a == 0.5
    assert apply_overrides(init_config(), ["K=400", "beta=7"]).p_a == 0.03125
    assert apply_overrides(init_config(), ["M=400"]).p_a == 0.125


def test_default_p_a_invalid():
    try:
        default_p_a(0, 5)
        assert False, "expected ValueError"
    except ValueError:
        pass
