import math

import numpy as np
import pytest

from herdisc.errors import ContractError, InvalidParameter, PreconditionError, RationalizationError
from herdisc.instances import InstanceSpec, generate, sylvester_hadamard
from herdisc.linalg import nuclear_norm, sigma_min
from herdisc.restricted import (
    EXTRACTION_CONSTANT,
    extract_spectral_subset,
    rationalize,
    rip_select,
    stable_rank,
    weighted_rip_select,
)


def test_stable_rank_examples():
    assert stable_rank(np.eye(4)) == pytest.approx(4.0)
    assert stable_rank(np.ones((3, 3))) == pytest.approx(1.0)
    assert stable_rank(np.diag([2.0, 1.0])) == pytest.approx(1.25)


def test_rip_select_identity():
    S = rip_select(np.eye(4), 2, 0.9)
    assert len(S) == 2
    assert sigma_min(np.eye(4)[:, S]) ** 2 >= 0.01 - 1e-12


def test_rip_select_precondition():
    with pytest.raises(PreconditionError):
        rip_select(np.eye(4), 3, 0.5)  # limit is 0.25 * 4 = 1
    with pytest.raises(PreconditionError):
        rip_select(np.eye(4), 0, 0.5)
    with pytest.raises(InvalidParameter):
        rip_select(np.eye(4), 1, 1.5)


def test_rip_select_contract_holds_on_random(rng):
    for _ in range(20):
        B = rng.standard_normal((6, 10))
        eps = 0.5
        k = int(math.floor(eps**2 * stable_rank(B)))
        if k < 1:
            continue
        S = rip_select(B, k, eps)
        assert len(set(S)) == k
        assert sigma_min(B[:, S]) ** 2 >= (1 - eps) ** 2 * np.sum(B * B) / B.shape[1] * (1 - 1e-12)


def test_rip_select_rank_one_input_is_inadmissible():
    # two identical columns: any pair is singular
    B = np.array([[1.0, 1.0], [0.0, 0.0]])
    with pytest.raises(PreconditionError):
        rip_select(B, 2, 0.9)


def test_rationalize_examples():
    r = rationalize([0.5, 0.5], 4)
    assert (r.denominator, list(r.numerators)) == (4, [2, 2])
    r = rationalize([1 / 3, 1 / 3, 1 / 3], 4)
    assert r.numerators.sum() == 4 and sorted(r.numerators) == [1, 1, 2]
    assert r.numerators[0] == 2  # ties go to the smaller index


def test_rationalize_error_bound(rng):
    for N in (9, 100, 2**16):
        Q = rng.dirichlet(np.ones(9))
        r = rationalize(Q, N)
        assert r.numerators.sum() == N
        assert np.max(np.abs(r.weights - Q)) < 1.0 / N + 1e-15


def test_rationalize_small_cap():
    with pytest.raises(InvalidParameter):
        rationalize(np.full(5, 0.2), 3)


def test_weighted_rip_select_uniform_identity():
    S = weighted_rip_select(np.eye(4), np.full(4, 0.25), 1, 0.5)
    assert len(S) == 1


def test_weighted_rip_select_rationalization_error():
    # weight 1e-3 on the second column rounds to zero with N=4
    A = np.eye(2)
    Q = np.array([0.999, 0.001])
    with pytest.raises((RationalizationError, PreconditionError)):
        weighted_rip_select(A, Q, 2, 0.99, N_cap=4)


def _contract(A, Q, S):
    m = A.shape[0]
    nuc = nuclear_norm(A * np.sqrt(Q)[None, :])
    return len(S) * sigma_min(A[:, S]) ** 2, EXTRACTION_CONSTANT * nuc**2 / math.log2(m) ** 2


def test_extraction_identity():
    S, trace = extract_spectral_subset(np.eye(4), np.full(4, 0.25))
    got, need = _contract(np.eye(4), np.full(4, 0.25), S)
    assert got >= need
    assert trace.certified == pytest.approx(got)
    assert sum(len(v) for v in trace.buckets.values()) + len(trace.tail) == 4


def test_extraction_hadamard():
    H = sylvester_hadamard(8)
    S, _ = extract_spectral_subset(H, np.full(8, 1 / 8))
    got, need = _contract(H, np.full(8, 1 / 8), S)
    assert got >= need


def test_extraction_single_row():
    S, trace = extract_spectral_subset(np.array([[0.5, -2.0, 1.0]]), np.full(3, 1 / 3))
    assert S == [1]
    assert trace.tau == math.inf


def test_extraction_buckets_are_dyadic(rng):
    A = rng.standard_normal((8, 12))
    Q = rng.dirichlet(np.ones(12))
    S, trace = extract_spectral_subset(A, Q)
    sig = np.linalg.svd(A * np.sqrt(Q)[None, :], compute_uv=False)
    shat = sig / sig.sum()
    for k, idx in trace.buckets.items():
        for i in idx:
            assert 2.0 ** (-k - 1) < shat[i] <= 2.0 ** (-k)
    for i in trace.tail:
        assert shat[i] <= 1 / 16
    assert trace.bucket_mass[trace.chosen_k] == max(trace.bucket_mass.values())
    assert trace.bucket_mass[trace.chosen_k] >= 1 / (2 * (math.ceil(math.log2(8)) + 1)) - 1e-12


@pytest.mark.parametrize("seed", range(40))
def test_extraction_contract_random(seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    m, n = (int(x) for x in rng.integers(2, 13, size=2))
    family = ("random_pm1", "random_gaussian", "random_unit_columns")[seed % 3]
    A = generate(InstanceSpec(family, n=n, m=m, seed=seed))
    Q = rng.dirichlet(np.ones(n) * 0.5)
    S, _ = extract_spectral_subset(A, Q)
    got, need = _contract(A, Q, S)
    assert got >= need * (1 - 1e-9)


def test_extraction_contract_error_has_subset(monkeypatch):
    import herdisc.restricted as r

    monkeypatch.setattr(r, "EXTRACTION_CONSTANT", 1e6)
    with pytest.raises(ContractError) as err:
        r.extract_spectral_subset(np.eye(4), np.full(4, 0.25))
    assert err.value.subset and err.value.trace.certified == err.value.achieved
