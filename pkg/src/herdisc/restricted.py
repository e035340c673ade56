"""Column subsets with a large least singular value.

``rip_select`` and ``weighted_rip_select`` return ``k`` columns whose least
singular value clears the restricted-invertibility threshold; every answer is
recomputed before it is returned, and a shortfall raises ``ContractError``
rather than handing back a weak subset. ``extract_spectral_subset`` finds a
subset certifying a large spectral lower bound from a pair of weights via
dyadic bucketing of the singular values.
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .errors import (
    ContractError,
    InvalidMatrix,
    InvalidParameter,
    PreconditionError,
    RationalizationError,
)
from .linalg import as_matrix, check_weights

EXHAUSTIVE_MAX_N = 12
EXTRACTION_CONSTANT = 1.0 / 256.0


def stable_rank(M):
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0.0
    return float(np.sum(s * s) / (s[0] * s[0]))


def _subset_sigma_min_sq(gram, S):
    if len(S) == 0:
        return np.inf
    return float(max(np.linalg.eigvalsh(gram[np.ix_(S, S)])[0], 0.0))


def greedy_order(M, candidates, k):
    """Greedily grow a subset of ``candidates``, maximizing ``sigma_min^2`` each round.

    Ties go to the smallest column index. Returns the chosen order and the
    squared least singular value of every prefix.
    """
    gram = M.T @ M
    chosen = []
    values = []
    pool = [int(j) for j in candidates]
    for _ in range(min(k, len(pool))):
        if not chosen:
            scores = np.diag(gram)[pool]
        else:
            idx = np.array([chosen + [j] for j in pool])
            blocks = gram[idx[:, :, None], idx[:, None, :]]
            scores = np.linalg.eigvalsh(blocks)[:, 0]
        best = int(np.argmax(scores))
        chosen.append(pool.pop(best))
        values.append(max(float(scores[best]), 0.0))
    return chosen, values


def _search(M, candidates, k, threshold):
    """Greedy pass, then an exhaustive pass over small candidate sets."""
    order, values = greedy_order(M, candidates, k)
    achieved = values[-1] if len(order) == k else 0.0
    if achieved >= threshold:
        return sorted(order), achieved
    best_S, best_val = sorted(order), achieved
    if len(candidates) <= EXHAUSTIVE_MAX_N:
        gram = M.T @ M
        for S in itertools.combinations(candidates, k):
            val = _subset_sigma_min_sq(gram, list(S))
            if val > best_val:
                best_S, best_val = list(S), val
                if val >= threshold:
                    break
    return best_S, best_val


def rip_select(B, k, epsilon):
    """``k`` columns of ``B`` with ``sigma_min^2 >= (1 - eps)^2 ||B||_F^2 / n``.

    Requires ``1 <= k <= eps^2 * srank(B)``.

    Raises
    ------
    PreconditionError
        ``k`` outside the admissible range.
    ContractError
        No subset meeting the bound was found; carries the achieved value.
    """
    B = as_matrix(B, "B")
    if not 0 < epsilon < 1:
        raise InvalidParameter(f"epsilon must lie in (0, 1), got {epsilon}")
    n = B.shape[1]
    limit = epsilon**2 * stable_rank(B)
    if not 1 <= k <= limit + 1e-12:
        raise PreconditionError(f"k={k} outside [1, eps^2 * srank] = [1, {limit:.6g}]")
    return _rip_select_unchecked(B, k, epsilon, np.sum(B * B) / n, range(n))


def _rip_select_unchecked(B, k, epsilon, energy, candidates):
    threshold = (1.0 - epsilon) ** 2 * energy
    S, achieved = _search(B, list(candidates), k, threshold)
    # recompute on the returned subset rather than trusting the search
    check = _subset_sigma_min_sq(B.T @ B, S) if len(S) == k else 0.0
    if len(S) != k or check < threshold * (1 - 1e-12):
        raise ContractError(
            f"best subset of size {k} has sigma_min^2 = {check:.6g} < required {threshold:.6g}",
            achieved=check,
            required=threshold,
        )
    return S


@dataclass(frozen=True)
class RationalizedWeights:
    """Weights ``numerators / denominator``; column ``j`` stands for ``numerators[j]`` copies."""

    denominator: int
    numerators: np.ndarray

    @property
    def weights(self):
        return self.numerators / self.denominator


def rationalize(Q, N_cap=2**16):
    """Round trace-one weights to multiples of ``1 / N_cap`` (largest remainder)."""
    Q = check_weights(Q, name="Q")
    if N_cap < Q.size:
        raise InvalidParameter(f"N_cap={N_cap} is smaller than the number of weights {Q.size}")
    scaled = Q * N_cap
    base = np.floor(scaled).astype(np.int64)
    short = int(N_cap - base.sum())
    frac = scaled - base
    # stable sort: equal remainders go to the smaller index first
    order = np.argsort(-frac, kind="stable")
    if short > 0:
        base[order[:short]] += 1
    elif short < 0:
        take = [j for j in order[::-1] if base[j] > 0][: -short]
        base[take] -= 1
    return RationalizedWeights(int(N_cap), base)


def _weighted_limit(A, w, epsilon):
    M = A * np.sqrt(w)[None, :]
    return epsilon**2 * stable_rank(M), float(np.sum(M * M))


def weighted_rip_select(A, Q, k, epsilon, N_cap=2**16, check_precondition=True):
    """``k`` distinct columns with ``sigma_min^2 >= (1 - eps)^2 ||A Q^{1/2}||_F^2``.

    ``Q`` is first rounded by ``rationalize``; only columns with positive
    rounded weight are eligible, and the bound is verified with the rounded
    weights.

    Raises
    ------
    RationalizationError
        ``k`` is admissible for ``Q`` but not after rounding (raise ``N_cap``).
    PreconditionError
        ``k`` is not admissible for ``Q`` itself.
    ContractError
        As in ``rip_select``.
    """
    A = as_matrix(A, "A")
    if not 0 < epsilon < 1:
        raise InvalidParameter(f"epsilon must lie in (0, 1), got {epsilon}")
    Q = check_weights(Q, A.shape[1], name="Q")
    rq = rationalize(Q, N_cap)
    w = rq.weights
    limit, energy = _weighted_limit(A, w, epsilon)
    if check_precondition and not 1 <= k <= limit + 1e-12:
        limit_orig, _ = _weighted_limit(A, Q, epsilon)
        if 1 <= k <= limit_orig + 1e-12:
            raise RationalizationError(
                f"k={k} admissible for the weights but not after rounding to N={N_cap} "
                f"(limit {limit:.6g}); raise N_cap"
            )
        raise PreconditionError(f"k={k} outside [1, eps^2 * srank(A Q^1/2)] = [1, {limit:.6g}]")
    candidates = np.nonzero(rq.numerators > 0)[0]
    return _rip_select_unchecked(A, k, epsilon, energy, candidates)


@dataclass
class ExtractionTrace:
    """Bookkeeping for one run of ``extract_spectral_subset``.

    ``buckets`` maps ``k`` to the singular-value indices whose normalized
    value lies in ``(2^{-k-1}, 2^{-k}]``; ``tail`` holds those at most
    ``1 / (2m)``. ``bucket_mass`` is the normalized nuclear mass of each
    bucket. ``certified`` is ``|S| * sigma_min(A|_S)^2`` for the returned
    subset and ``required`` the bound it is checked against.
    """

    buckets: dict
    tail: list
    chosen_k: int
    tau: float
    bucket_rank: int
    projector_basis: np.ndarray
    epsilon: float
    selected: list
    bucket_mass: dict = field(default_factory=dict)
    rip_k: int = 0
    rip_subset: list = field(default_factory=list)
    certified: float = 0.0
    required: float = 0.0
    nuclear: float = 0.0


def _certified(gram, S):
    return len(S) * _subset_sigma_min_sq(gram, S)


def _best_prefix(gram, order):
    best, best_val = order[:1], -1.0
    for i in range(1, len(order) + 1):
        val = _certified(gram, order[:i])
        if val > best_val * (1 + 1e-12):
            best, best_val = order[:i], val
    return sorted(best), best_val


def extract_spectral_subset(A, Q, epsilon=0.5, N_cap=2**16):
    """Column subset ``S`` with ``|S| sigma_min(A|_S)^2`` bounded below by the weighted nuclear norm.

    Guarantee checked before returning (``m >= 2``)::

        |S| * sigma_min(A|_S)^2 >= ||A Q^{1/2}||_{S1}^2 / (256 * log2(m)^2)

    Steps: normalize the singular values of ``A Q^{1/2}`` to sum to one,
    bucket them dyadically, keep the heaviest bucket, project ``A`` onto its
    left singular vectors and run ``weighted_rip_select`` there. The result
    is then compared with greedy prefixes on the projected and on the raw
    matrix, and the subset with the best certified value wins.

    Returns
    -------
    S : list of int
    trace : ExtractionTrace
    """
    A = as_matrix(A, "A")
    m, n = A.shape
    Q = check_weights(Q, n, name="Q")
    if not np.any(A):
        raise InvalidMatrix("extraction needs a nonzero matrix")
    gram = A.T @ A
    M = A * np.sqrt(Q)[None, :]
    U, sig, _ = np.linalg.svd(M, full_matrices=False)
    nuc = float(sig.sum())
    if m == 1:
        j = int(np.argmax(np.abs(A[0])))
        trace = ExtractionTrace({}, [], 0, math.inf, 1, np.ones((1, 1)), epsilon, [j],
                                nuclear=nuc, certified=_certified(gram, [j]))
        return [j], trace
    shat = sig / nuc
    top = math.ceil(math.log2(m))
    tail = [int(i) for i in np.nonzero(shat <= 1.0 / (2 * m))[0]]
    buckets, mass = {}, {}
    for k in range(top + 1):
        idx = np.nonzero((shat > 2.0 ** (-k - 1)) & (shat <= 2.0 ** (-k)) & (shat > 1.0 / (2 * m)))[0]
        buckets[k] = [int(i) for i in idx]
        mass[k] = float(shat[idx].sum())
    kstar = max(mass, key=lambda k: (mass[k], -k))
    T = buckets[kstar]
    basis = U[:, T]
    B = basis.T @ A
    limit, _ = _weighted_limit(B, rationalize(Q, N_cap).weights, epsilon)
    rip_k = max(1, int(math.floor(limit + 1e-12)))
    try:
        rip_S = weighted_rip_select(B, Q, rip_k, epsilon, N_cap, check_precondition=rip_k > 1)
    except ContractError:
        rip_S = []
    pool = []
    if rip_S:
        pool.append((sorted(rip_S), _certified(gram, rip_S)))
    support = np.nonzero(Q > 0)[0]
    order_B, _ = greedy_order(B, support, len(T))
    pool.append(_best_prefix(gram, order_B))
    order_A, _ = greedy_order(A, range(n), min(m, n))
    pool.append(_best_prefix(gram, order_A))
    # first entry wins on ties, so the bucket selection is preferred
    S, cert = pool[0]
    for cand, val in pool[1:]:
        if val > cert * (1 + 1e-12):
            S, cert = cand, val
    required = EXTRACTION_CONSTANT * nuc**2 / math.log2(m) ** 2
    trace = ExtractionTrace(
        buckets=buckets,
        tail=tail,
        chosen_k=kstar,
        tau=1.0 / (2.0 * math.log2(m)),
        bucket_rank=len(T),
        projector_basis=basis,
        epsilon=epsilon,
        selected=S,
        bucket_mass=mass,
        rip_k=rip_k,
        rip_subset=sorted(rip_S),
        certified=cert,
        required=required,
        nuclear=nuc,
    )
    if cert < required * (1 - 1e-9):
        exc = ContractError(
            f"extracted subset certifies {cert:.6g} < required {required:.6g}",
            achieved=cert,
            required=required,
        )
        # callers that can use a weaker certificate still get the subset
        exc.subset, exc.trace = S, trace
        raise exc
    return S, trace
