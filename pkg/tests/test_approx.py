import copy
import json
import math

import numpy as np
import pytest

from conftest import pm1
from herdisc.approx import AlgorithmOptions, approximate_herdisc, to_json, verify_report
from herdisc.errors import InvalidMatrix, InvalidParameter
from herdisc.instances import InstanceSpec, generate, sylvester_hadamard


def test_identity_sandwich_is_tight():
    r = approximate_herdisc(np.eye(4))
    assert r.mu == pytest.approx(1.0, abs=1e-6)
    assert r.alpha == pytest.approx(1.0, abs=1e-6)
    assert r.guarantee_ratio_vec == pytest.approx(1.0, abs=1e-5)
    assert r.oracle_values["herdisc"] == 1.0


def test_hadamard_sandwich():
    r = approximate_herdisc(sylvester_hadamard(4))
    ov = r.oracle_values
    assert r.alpha <= ov["hvecdisc"] + 1e-4
    assert ov["hvecdisc"] <= r.mu + 1e-3
    assert r.alpha <= ov["herdisc"]
    assert ov["det_lb"] == pytest.approx(2.0)
    assert ov["disc"] == 2.0


@pytest.mark.parametrize("seed", range(6))
def test_random_sandwich(seed):
    A = pm1(5, 5, 100 + seed)
    r = approximate_herdisc(A)
    ov = r.oracle_values
    assert r.converged and r.relative_gap <= 1e-4
    assert r.alpha <= ov["vecdisc_subset"] + 1e-6
    assert r.alpha <= ov["herdisc"] + 1e-9
    assert ov["hvecdisc"] <= r.mu + 1e-3
    assert r.alpha >= r.alpha_theory
    assert r.extraction["contract_met"]
    assert verify_report(A, r).passed


def test_single_row():
    r = approximate_herdisc(np.array([[1.0, -2.0, 0.5]]))
    assert r.alpha == pytest.approx(2.0)
    assert r.mu == pytest.approx(2.0, rel=1e-4)


def test_zero_matrix():
    with pytest.raises(InvalidMatrix):
        approximate_herdisc(np.zeros((2, 2)))


def test_option_validation():
    with pytest.raises(InvalidParameter):
        approximate_herdisc(np.eye(2), AlgorithmOptions(epsilon=1.0))
    with pytest.raises(InvalidParameter):
        approximate_herdisc(np.eye(2), AlgorithmOptions(oracle_max_n=0))


def test_oracles_skipped_above_caps():
    r = approximate_herdisc(sylvester_hadamard(8), AlgorithmOptions(oracle_max_n=4, herdisc_oracle_max_n=4))
    assert r.oracle_values["disc"] is None
    assert r.oracle_values["herdisc"] is None


def test_oracles_off():
    assert approximate_herdisc(np.eye(2), AlgorithmOptions(oracles=False)).oracle_values == {}


def test_verify_detects_tampering():
    A = generate(InstanceSpec("intervals", n=5))
    r = approximate_herdisc(A)
    d = json.loads(to_json(r))
    assert verify_report(A, d).passed

    bad = copy.deepcopy(d)
    bad["alpha"] *= 1.01
    assert {c.name for c in verify_report(A, bad).failures()} == {"alpha_matches_subset"}

    bad = copy.deepcopy(d)
    bad["ellipsoid"]["inverse_shape"] = (0.5 * np.asarray(d["ellipsoid"]["inverse_shape"])).tolist()
    names = {c.name for c in verify_report(A, bad).failures()}
    assert "ellipsoid_contains_columns" in names

    bad = copy.deepcopy(d)
    bad["dual_witness"]["value"] += 0.1
    assert "dual_value_matches" in {c.name for c in verify_report(A, bad).failures()}

    bad = copy.deepcopy(d)
    bad["subset_witness"]["subset"] = [0, 0]
    assert "alpha_matches_subset" in {c.name for c in verify_report(A, bad).failures()}


def test_to_json_is_deterministic_and_parseable():
    A = pm1(3, 4, 1)
    a = to_json(approximate_herdisc(A))
    b = to_json(approximate_herdisc(A))
    assert a == b
    d = json.loads(a)
    assert d["m"] == 3 and d["n"] == 4


def test_to_json_scalars():
    assert to_json({"a": math.inf, "b": True, "c": None, "d": np.int64(3)}) == (
        '{\n  "a": null,\n  "b": true,\n  "c": null,\n  "d": 3\n}'
    )
    assert to_json([0.1]) == "[0.10000000000000001]"
