import json

import pytest

from cachematch.config import (
    CONFIG_KEYS,
    PolyKPoint,
    SystemConfig,
    load_config,
    validate,
)
from cachematch.errors import HardInvariantViolation

from conftest import make_config


def test_properties(base_config):
    assert base_config.num_clusters == 10
    assert base_config.alpha == pytest.approx(0.1931471805599453, rel=1e-14)
    assert base_config.expected_users == pytest.approx(25.0)
    # floor = 2*(1+t0)/alpha * log K
    assert base_config.cluster_floor == pytest.approx(95.3709, rel=1e-4)
    assert not base_config.meets_cluster_floor


def test_validate_clean():
    config = SystemConfig(K=600, d=60, N=600, M=2.0, rho=0.1, beta=0.0, t0=1.0)
    report = validate(config)
    assert report.ok
    assert report.warnings == ()
    assert report.hard_failures == ()
    assert {c.name for c in report.checks} >= {
        "integer_sizes",
        "positive_sizes",
        "cluster_divides",
        "catalog_covers_caches",
        "intensity_range",
        "zipf_exponent",
        "tail_slack",
        "cluster_floor",
    }


def test_validate_floor_warning(base_config):
    report = validate(base_config)
    assert report.ok
    assert [c.name for c in report.warnings] == ["cluster_floor"]


@pytest.mark.parametrize(
    "overrides, failing",
    [
        (dict(rho=0.6), "intensity_range"),
        (dict(rho=0.0), "intensity_range"),
        (dict(beta=1.0), "zipf_exponent"),
        (dict(beta=-0.5), "zipf_exponent"),
        (dict(t0=0.0), "tail_slack"),
        (dict(d=7), "cluster_divides"),
        (dict(N=50), "catalog_covers_caches"),
        (dict(M=-1.0), "memory_nonnegative"),
        (dict(K=0), "positive_sizes"),
    ],
)
def test_validate_hard_failures(overrides, failing):
    config = make_config(**overrides)
    with pytest.raises(HardInvariantViolation) as err:
        validate(config)
    assert failing in {c.name for c in err.value.report.hard_failures}


def test_validate_noninteger_sizes():
    config = make_config(K=100.0)
    with pytest.raises(HardInvariantViolation) as err:
        validate(config)
    assert "integer_sizes" in {c.name for c in err.value.report.hard_failures}


def test_load_config_round_trip(tmp_path):
    payload = dict(k=600, d=60, n=600, m=2.0, rho=0.1, beta=0.0, t0=1.0)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload))
    config = load_config(str(path))
    assert config == SystemConfig(K=600, d=60, N=600, M=2.0, rho=0.1, beta=0.0, t0=1.0)


def test_load_shipped_configs():
    default = load_config("configs/default.json")
    assert validate(default).ok
    steep = load_config("configs/steep.json")
    assert validate(steep).ok
    assert steep.beta > 1


@pytest.mark.parametrize(
    "payload",
    [
        {"k": 10},  # missing keys
        dict(k=10, d=2, n=10, m=1, rho=0.2, beta=0, t0=1, extra=5),  # unknown key
        [1, 2, 3],  # not an object
    ],
)
def test_load_config_rejects_malformed(tmp_path, payload):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(HardInvariantViolation):
        load_config(str(path))


def test_config_keys_frozen():
    assert CONFIG_KEYS == ("k", "d", "n", "m", "rho", "beta", "t0")


def test_polyk_point():
    point = PolyKPoint(nu=1.0, delta=0.5, mu=0.3, beta=0.5)
    assert point.mu == 0.3
    with pytest.raises(ValueError):
        PolyKPoint(nu=0.9, delta=0.5, mu=0.3, beta=0.5)
    with pytest.raises(ValueError):
        PolyKPoint(nu=1.0, delta=0.0, mu=0.3, beta=0.5)
    with pytest.raises(ValueError):
        PolyKPoint(nu=1.0, delta=1.5, mu=0.3, beta=0.5)
    with pytest.raises(ValueError):
        PolyKPoint(nu=1.0, delta=0.5, mu=-0.1, beta=0.5)
    with pytest.raises(ValueError):
        PolyKPoint(nu=2.0, delta=0.5, mu=1.2, beta=0.5)
    with pytest.raises(ValueError):
        PolyKPoint(nu=1.0, delta=0.5, mu=0.3, beta=-1.0)
