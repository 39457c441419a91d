import json
import math

import numpy as np
import pytest

from cachematch.config import load_config
from cachematch.errors import HardInvariantViolation, IncompatibleScheme
from cachematch.hcm import hcm_rate
from cachematch.montecarlo import (
    HCM_SCHEME,
    PAM_SHALLOW_SCHEME,
    PAM_STEEP_SCHEME,
    PCD_SCHEME,
    SCHEMES,
    ExperimentSpec,
    analytic_rate,
    check_compatibility,
    collect_trials,
    run_experiment,
    run_trials,
)
from cachematch.pam_shallow import pam_shallow_rate
from cachematch.pam_steep import pam_steep_rate
from cachematch.pcd import pcd_rate_shallow, pcd_rate_steep

from conftest import make_config

SMALL = dict(K=20, d=10, N=20, M=2.0)
SMALL_STEEP = dict(K=20, d=10, N=20, M=2.0, beta=2.0)


def _spec(scheme, trials=5, seed=11, t_param=None, **overrides):
    return ExperimentSpec(
        config=make_config(**overrides),
        scheme=scheme,
        trials=trials,
        seed=seed,
        t_param=t_param,
    )


def test_compatibility_matrix():
    check_compatibility(make_config(), PCD_SCHEME)
    check_compatibility(make_config(beta=2.0), PCD_SCHEME)
    check_compatibility(make_config(), PAM_SHALLOW_SCHEME)
    check_compatibility(make_config(beta=0.5), HCM_SCHEME)
    check_compatibility(make_config(beta=2.0), PAM_STEEP_SCHEME)
    with pytest.raises(IncompatibleScheme):
        check_compatibility(make_config(), "broadcast")
    with pytest.raises(IncompatibleScheme):
        check_compatibility(make_config(beta=2.0), PAM_SHALLOW_SCHEME)
    with pytest.raises(IncompatibleScheme):
        check_compatibility(make_config(beta=1.5), HCM_SCHEME)
    with pytest.raises(IncompatibleScheme):
        check_compatibility(make_config(beta=0.5), PAM_STEEP_SCHEME)
    with pytest.raises(IncompatibleScheme):
        check_compatibility(make_config(K=100, d=1, beta=2.0), PAM_STEEP_SCHEME)


def test_analytic_dispatch():
    assert analytic_rate(_spec(PCD_SCHEME)) == pcd_rate_shallow(make_config()).total
    steep = load_config("configs/steep.json")
    steep_spec = ExperimentSpec(config=steep, scheme=PCD_SCHEME, trials=1, seed=0)
    assert analytic_rate(steep_spec) == pcd_rate_steep(steep).total
    assert analytic_rate(_spec(PAM_SHALLOW_SCHEME)) == pam_shallow_rate(make_config())
    ks_spec = ExperimentSpec(config=steep, scheme=PAM_STEEP_SCHEME, trials=1, seed=0)
    assert analytic_rate(ks_spec) == pam_steep_rate(steep).order_value
    # hierarchical slack defaults to t0 and can be overridden
    assert analytic_rate(_spec(HCM_SCHEME)) == hcm_rate(make_config(), 1.0)
    assert analytic_rate(_spec(HCM_SCHEME, t_param=0.5)) == hcm_rate(
        make_config(), 0.5
    )


@pytest.mark.parametrize("scheme", [PCD_SCHEME, PAM_STEEP_SCHEME])
def test_trial_rows_are_keyed_by_absolute_index(scheme):
    overrides = SMALL_STEEP if scheme == PAM_STEEP_SCHEME else SMALL
    spec = _spec(scheme, trials=5, **overrides)
    full = run_trials(spec, 0, 5)
    part = run_trials(spec, 2, 3)
    assert np.array_equal(part, full[2:5])


def test_collect_preserves_trial_order_across_workers():
    spec = _spec(PCD_SCHEME, trials=7, **SMALL)
    serial = collect_trials(spec, workers=1)
    parallel = collect_trials(spec, workers=2)
    assert serial.shape == (7, 3)
    assert np.array_equal(serial, parallel)


def test_reports_identical_across_workers():
    spec = _spec(PCD_SCHEME, trials=6, **SMALL)
    a = run_experiment(spec, workers=1).to_json(spec.config)
    b = run_experiment(spec, workers=2).to_json(spec.config)
    assert a == b


def test_report_recomputes_from_rows():
    spec = _spec(PCD_SCHEME, trials=8, **SMALL)
    report = run_experiment(spec)
    rows = collect_trials(spec)
    mean = float(rows[:, 0].mean())
    stderr = float(rows[:, 0].std(ddof=1) / math.sqrt(8))
    assert report.mean_rate == mean
    assert report.stderr == stderr
    assert report.coded_mean == float(rows[:, 1].mean())
    assert report.unmatched_mean == float(rows[:, 2].mean())
    assert report.analytic_rate == analytic_rate(spec)
    assert isinstance(report.bound_satisfied, bool)
    assert report.bound_satisfied == (mean <= report.analytic_rate + 3.0 * stderr)


def test_single_trial_has_zero_stderr():
    report = run_experiment(_spec(PCD_SCHEME, trials=1, **SMALL))
    assert report.stderr == 0.0


@pytest.mark.parametrize("scheme", list(SCHEMES))
def test_row_semantics(scheme):
    if scheme == PAM_STEEP_SCHEME:
        overrides = SMALL_STEEP
    else:
        overrides = SMALL
    spec = _spec(scheme, trials=10, **overrides)
    rows = collect_trials(spec)
    assert rows.shape == (10, 3)
    assert np.all(np.isfinite(rows))
    assert np.all(rows >= 0.0)
    if scheme in (PAM_SHALLOW_SCHEME, PAM_STEEP_SCHEME):
        # replication schemes have no coded component
        assert np.all(rows[:, 1] == 0.0)
    else:
        # total is coded + unmatched, clamped at the user count
        assert np.all(rows[:, 0] <= rows[:, 1] + rows[:, 2] + 1e-12)
    if scheme == PAM_STEEP_SCHEME:
        # server broadcasts at most one file per unmatched request
        assert np.all(rows[:, 0] <= rows[:, 2] + 1e-12)


def test_json_report_is_canonical():
    spec = _spec(PCD_SCHEME, trials=4, **SMALL)
    text = run_experiment(spec).to_json(spec.config)
    assert text == run_experiment(spec).to_json(spec.config)
    assert " " not in text
    payload = json.loads(text)
    assert sorted(payload) == list(payload)  # written with sorted keys
    assert set(payload["config"]) == {"k", "d", "n", "m", "rho", "beta", "t0"}
    assert isinstance(payload["bound_satisfied"], bool)
    assert payload["trials"] == 4
    assert payload["seed"] == 11


def test_rejects_bad_specs():
    with pytest.raises(IncompatibleScheme):
        collect_trials(_spec(PCD_SCHEME, trials=0, **SMALL))
    with pytest.raises(IncompatibleScheme):
        collect_trials(_spec("broadcast", trials=2, **SMALL))
    with pytest.raises(HardInvariantViolation):
        collect_trials(_spec(PCD_SCHEME, trials=2, rho=0.6))
