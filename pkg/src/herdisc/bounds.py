"""Exact oracles and the relaxation-based bounds on discrepancy.

Enumeration oracles (``disc_exact``, ``herdisc_exact``, ``det_lb_exact``) are
exponential and refuse instances above a configurable cap. The vector
relaxation and the spectral variant are solved with a small barrier method
over Gram matrices with unit diagonal; the vector solve also emits a dual
certificate that can be checked independently.
"""

from dataclasses import dataclass
import itertools
import math
import os

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp, softmax

from ._barrier import lmi_minimize
from ._kernels import disc_enumerate, herdisc_enumerate
from .errors import InvalidParameter, InvalidSubset, OracleTooLarge, PreconditionError
from .linalg import as_matrix, check_weights, psd_sqrt, sigma_min

DISC_ORACLE_MAX_N = 20
HERDISC_ORACLE_MAX_N = 14
DET_MAX_SUBMATRICES = 2_000_000
ORACLE_ENV = "HERDISC_ORACLE_MAX_N"


def default_disc_cap():
    """Disc oracle cap, honoring ``HERDISC_ORACLE_MAX_N`` when set."""
    raw = os.environ.get(ORACLE_ENV)
    if raw is None or not raw.strip():
        return DISC_ORACLE_MAX_N
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidParameter(f"{ORACLE_ENV}={raw!r} is not an integer") from None
    if cap < 1:
        raise InvalidParameter(f"{ORACLE_ENV} must be positive, got {cap}")
    return cap


@dataclass(frozen=True)
class Coloring:
    signs: np.ndarray


def disc_exact(A, cap=None):
    """``min_x ||A x||_inf`` over ``x in {-1, +1}^n`` by enumeration.

    Returns
    -------
    value : float
    coloring : Coloring
        Lexicographically smallest optimal sign vector (``+1`` before ``-1``).
    """
    A = as_matrix(A, "A")
    cap = default_disc_cap() if cap is None else cap
    if A.shape[1] > cap:
        raise OracleTooLarge("disc_exact", A.shape[1], cap, "oracle_max_n")
    _, signs = disc_enumerate(A)
    return float(np.max(np.abs(A @ signs))), Coloring(signs)


def herdisc_exact(A, cap=HERDISC_ORACLE_MAX_N):
    """``max_S disc(A|_S)`` over nonempty column subsets; returns ``(value, S)``."""
    A = as_matrix(A, "A")
    if A.shape[1] > cap:
        raise OracleTooLarge("herdisc_exact", A.shape[1], cap, "herdisc_oracle_max_n")
    _, S = herdisc_enumerate(A)
    _, signs = disc_enumerate(A, S)
    return float(np.max(np.abs(A[:, S] @ signs))), S


@dataclass
class GramAssignment:
    """Unit vectors ``u_j`` (columns of ``factor``) with Gram matrix ``gram``.

    ``value`` is ``max_i sqrt(e_i^T A X A^T e_i)``. When the solver produced a
    dual certificate, ``row_weights`` and ``col_bound`` hold it and
    ``lower_bound`` is the value it certifies.
    """

    gram: np.ndarray
    factor: np.ndarray
    value: float
    converged: bool = True
    lower_bound: float = 0.0
    row_weights: np.ndarray | None = None
    col_bound: np.ndarray | None = None
    iterations: int = 0


@dataclass(frozen=True)
class VecdiscOptions:
    """Solver settings for the Gram-matrix programs.

    ``tol`` bounds the optimality gap of the squared objective after scaling
    ``A`` to unit max-entry. ``method="factored"`` switches the vector solve to
    smoothed-max minimization over unit-column factors with ``restarts``
    seeded starts.
    """

    tol: float = 1e-9
    method: str = "barrier"
    max_iters: int = 2000
    restarts: int = 5
    seed: int = 0


def _offdiag_basis(n):
    iu = np.triu_indices(n, 1)
    k = iu[0].size
    Fl = np.zeros((k + 1, n, n))
    idx = np.arange(k)
    Fl[idx, iu[0], iu[1]] = 1.0
    Fl[idx, iu[1], iu[0]] = 1.0
    return iu, Fl


def _gram_from(x, iu, n):
    X = np.eye(n)
    X[iu] = x[: iu[0].size]
    X[(iu[1], iu[0])] = x[: iu[0].size]
    return X


def _rows_value(A, X):
    return float(np.sqrt(max(np.max(np.sum((A @ X) * A, axis=1)), 0.0)))


def _assignment(A, X, converged, iterations, **extra):
    U = psd_sqrt(X)
    # renormalize columns so the stored vectors are exactly unit length
    U = U / np.linalg.norm(U, axis=0)
    G = U.T @ U
    return GramAssignment(G, U, _rows_value(A, G), converged, iterations=iterations, **extra)


def _vecdisc_barrier(A, opts):
    m, n = A.shape
    scale = float(np.max(np.abs(A)))
    B = A / scale
    iu, Fl_X = _offdiag_basis(n)
    k = iu[0].size
    F0 = -np.diag(np.sum(B * B, axis=1))
    Fl = np.zeros((k + 1, m, m))
    Fl[np.arange(k)[:, None], np.arange(m)[None, :], np.arange(m)[None, :]] = -2.0 * (B[:, iu[0]] * B[:, iu[1]]).T
    Fl[k] = np.eye(m)
    c = np.zeros(k + 1)
    c[k] = 1.0
    x0 = np.zeros(k + 1)
    x0[k] = 1.5 * float(np.max(np.sum(B * B, axis=1))) + 1.0
    res = lmi_minimize(c, [(np.eye(n), Fl_X), (F0, Fl)], x0, tol=opts.tol, max_newton=opts.max_iters)
    X = _gram_from(res.x, iu, n)
    # dual certificate: row weights from the row-slack block, column bound
    # from the Gram block, then shifted to make the PSD condition exact
    y = np.diag(res.inverse_slacks[1]).copy()
    y = np.maximum(y, 0.0)
    P = y / y.sum()
    M = B.T @ (P[:, None] * B)
    Z = res.inverse_slacks[0] / y.sum()
    Qd = np.diag(M) - np.diag(Z)
    shift = min(float(np.linalg.eigvalsh(M - np.diag(Qd))[0]), 0.0)
    Qd = Qd + shift - 1e-15 * (1.0 + np.abs(Qd).max())
    if Qd.sum() <= 0:
        # the zero bound is always certified by Qd = 0
        Qd = np.zeros(n)
    lower = math.sqrt(float(Qd.sum())) * scale
    return _assignment(
        A, X, res.converged, res.newton_steps,
        lower_bound=lower, row_weights=P, col_bound=Qd * scale**2,
    )


def _vecdisc_factored(A, opts):
    m, n = A.shape
    scale = float(np.max(np.abs(A)))
    B = A / scale
    rng = np.random.Generator(np.random.PCG64(opts.seed))

    def objective(w, tau):
        W = w.reshape(n, n)
        nr = np.linalg.norm(W, axis=0)
        U = W / nr
        M = B @ U.T
        v = np.sum(M * M, axis=1)
        pi = softmax(v / tau)
        gU = 2.0 * ((pi[:, None] * B).T @ M).T
        gW = (gU - U * np.sum(U * gU, axis=0)) / nr
        return tau * logsumexp(v / tau), gW.ravel()

    best = None
    for r in range(opts.restarts):
        w = (np.eye(n) if r == 0 else rng.standard_normal((n, n))).ravel()
        tau = 1.0
        while tau >= 1e-4:
            w = minimize(objective, w, args=(tau,), jac=True, method="L-BFGS-B",
                         options={"maxiter": 500, "gtol": 1e-10, "ftol": 1e-14}).x
            tau /= 2.0
        W = w.reshape(n, n)
        U = W / np.linalg.norm(W, axis=0)
        val = _rows_value(B, U.T @ U)
        if best is None or val < best[0]:
            best = (val, U)
    U = best[1]
    return _assignment(A, U.T @ U, True, opts.restarts)


def vecdisc_solve(A, opts=None):
    """Vector discrepancy: ``min max_i sqrt((A X A^T)_ii)`` over PSD ``X`` with unit diagonal.

    The default barrier method also returns a dual certificate
    (``row_weights``, ``col_bound``) that ``vecdisc_dual_check`` accepts for
    ``lower_bound``.
    """
    A = as_matrix(A, "A")
    opts = opts or VecdiscOptions()
    if opts.method not in ("barrier", "factored"):
        raise InvalidParameter(f"unknown method {opts.method!r}")
    n = A.shape[1]
    if not np.any(A):
        X = np.eye(n)
        return GramAssignment(X, X.copy(), 0.0, True)
    if n == 1:
        X = np.eye(1)
        val = float(np.max(np.abs(A)))
        return GramAssignment(X, X.copy(), val, True, lower_bound=val,
                              row_weights=(np.abs(A[:, 0]) == val) / np.sum(np.abs(A[:, 0]) == val),
                              col_bound=np.array([val * val]))
    if opts.method == "factored":
        return _vecdisc_factored(A, opts)
    return _vecdisc_barrier(A, opts)


def vecdisc_dual_check(A, P, Qd, D, tol=1e-9):
    """Check ``tr(Qd) >= D^2`` and ``A^T P A - diag(Qd) >= 0`` (up to ``tol``).

    With ``P`` a diagonal trace-one matrix (or its diagonal as a vector) a
    pass certifies ``vecdisc(A) >= D``; for a general PSD ``P`` of trace one
    it certifies that ``||A X A^T||_2 >= D^2`` for every unit-diagonal PSD ``X``.
    """
    A = as_matrix(A, "A")
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = np.diag(P)
    Qd = np.asarray(Qd, dtype=float)
    scale = 1.0 + float(np.max(np.abs(A))) ** 2
    if abs(np.trace(P) - 1.0) > 1e-9 or np.linalg.eigvalsh(0.5 * (P + P.T))[0] < -tol:
        return False
    if Qd.sum() < D * D - tol * scale:
        return False
    M = A.T @ P @ A - np.diag(Qd)
    return bool(np.linalg.eigvalsh(0.5 * (M + M.T))[0] >= -tol * scale)


def hvecdisc_exhaustive(A, cap=6, opts=None):
    """``max_S vecdisc(A|_S)`` over all nonempty column subsets; returns ``(value, S)``."""
    A = as_matrix(A, "A")
    n = A.shape[1]
    if n > cap:
        raise OracleTooLarge("hvecdisc_exhaustive", n, cap, "hvecdisc_oracle_max_n")
    best = (-1.0, [])
    for k in range(1, n + 1):
        for S in itertools.combinations(range(n), k):
            val = vecdisc_solve(A[:, list(S)], opts).value
            if val > best[0]:
                best = (val, list(S))
    return best


def _check_subset(S, n):
    S = [int(j) for j in S]
    if not S:
        raise InvalidSubset("subset must be nonempty")
    if len(set(S)) != len(S) or min(S) < 0 or max(S) >= n:
        raise InvalidSubset(f"subset {S} must hold distinct indices in [0, {n})")
    return S


def spectral_lb_value(A, S, P):
    """``sqrt(|S|) * sigma_min(P^{1/2} A|_S)``, a lower bound on ``vecdisc(A|_S)``."""
    A = as_matrix(A, "A")
    S = _check_subset(S, A.shape[1])
    P = check_weights(P, A.shape[0], name="P")
    return math.sqrt(len(S)) * sigma_min(np.sqrt(P)[:, None] * A[:, S])


def det_lb_exact(A, max_submatrices=DET_MAX_SUBMATRICES):
    """``max |det A_{R,C}|^{1/k}`` over all square submatrices.

    Raises ``OracleTooLarge`` when the number of square submatrices exceeds
    ``max_submatrices``.
    """
    A = as_matrix(A, "A")
    m, n = A.shape
    count = sum(math.comb(m, k) * math.comb(n, k) for k in range(1, min(m, n) + 1))
    if count > max_submatrices:
        raise OracleTooLarge("det_lb_exact", count, max_submatrices, "det_max_submatrices")
    best = 0.0
    for k in range(1, min(m, n) + 1):
        cols = np.array(list(itertools.combinations(range(n), k)))
        for rows in itertools.combinations(range(m), k):
            sub = A[np.array(rows)][:, cols].transpose(1, 0, 2)
            d = float(np.max(np.abs(np.linalg.det(sub))))
            if d > 0:
                best = max(best, d ** (1.0 / k))
    return best


def komlos_spectral_solve(A, opts=None):
    """Minimize ``||A X A^T||_2`` over PSD ``X`` with unit diagonal.

    Requires every column of ``A`` to have Euclidean norm at most one; the
    optimum is then at most one.

    Returns
    -------
    assignment : GramAssignment
    spectral_value : float
        ``||A X A^T||_2`` at the returned ``X``.
    """
    A = as_matrix(A, "A")
    opts = opts or VecdiscOptions()
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms > 1.0 + 1e-9):
        raise PreconditionError(f"column norm {norms.max():.12g} exceeds 1")
    m, n = A.shape
    if n == 1:
        X = np.eye(1)
        res_x = X
        steps = 0
        converged = True
    else:
        iu, Fl_X = _offdiag_basis(n)
        k = iu[0].size
        F0 = -A @ A.T
        Fl = np.zeros((k + 1, m, m))
        ai, aj = A[:, iu[0]].T, A[:, iu[1]].T
        Fl[:k] = -(ai[:, :, None] * aj[:, None, :] + aj[:, :, None] * ai[:, None, :])
        Fl[k] = np.eye(m)
        c = np.zeros(k + 1)
        c[k] = 1.0
        x0 = np.zeros(k + 1)
        x0[k] = 1.5 * float(np.linalg.eigvalsh(A @ A.T)[-1]) + 1.0
        res = lmi_minimize(c, [(np.eye(n), Fl_X), (F0, Fl)], x0, tol=opts.tol, max_newton=opts.max_iters)
        res_x = _gram_from(res.x, iu, n)
        steps = res.newton_steps
        converged = res.converged
    ga = _assignment(A, res_x, converged, steps)
    M = A @ ga.gram @ A.T
    return ga, float(np.linalg.eigvalsh(0.5 * (M + M.T))[-1])


@dataclass(frozen=True)
class BanaszczykReport:
    """Discrepancy measured in units of the ellipsoid's coordinate widths."""

    ratio: float
    reference: float
    widths: np.ndarray
    coloring: np.ndarray


def banaszczyk_diagnostic(A, E, cap=None):
    """``min_x max_i |(A x)_i| / w_i`` with ``w_i`` the width of ``E`` along ``e_i``.

    ``reference`` is ``sqrt(2 ln(2m))``. Purely diagnostic: no bound is asserted.
    """
    A = as_matrix(A, "A")
    w = E.coordinate_widths()
    value, col = disc_exact(A / w[:, None], cap)
    return BanaszczykReport(value, math.sqrt(2.0 * math.log(2 * A.shape[0])), w, col.signs)
