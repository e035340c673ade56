"""Minimum-width containing ellipsoids and their nuclear-norm duals.

The central problem: over all centered ellipsoids ``E = {x : x^T X x <= 1}``
containing every column of ``A``, minimize the largest coordinate extent
``||E||_inf = max_i sqrt((X^{-1})_ii)``. Its Lagrange dual is

    max  ||P^{1/2} A Q^{1/2}||_{S1}   over diagonal P, Q >= 0, tr P = tr Q = 1,

and the two optima coincide. Every solve returns a feasible ellipsoid (an upper
bound) together with a dual witness (a lower bound), so the reported gap is a
certificate rather than an estimate.

The default solver is a path-following Newton method on a log-barrier in the
inverse shape ``Y = X^{-1}``; a projected supergradient ascent on the dual is
available as ``method="supergradient"``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimError, InvalidMatrix, InvalidParameter, RankError
from .linalg import (
    as_matrix,
    check_weights,
    full_rank_reduce,
    nuclear_norm,
    psd_sqrt,
    sigma_min,
    simplex_project,
)


@dataclass(frozen=True)
class Ellipsoid:
    """Centered ellipsoid ``{x : x^T X x <= 1} = F * (unit ball)``.

    Attributes
    ----------
    shape : ndarray
        Positive definite ``X``.
    factor : ndarray
        Symmetric ``F = X^{-1/2}``.
    linf_width : float
        ``max_i ||F e_i||``, the largest coordinate extent of the body.
    """

    shape: np.ndarray
    factor: np.ndarray
    linf_width: float

    @classmethod
    def from_inverse_shape(cls, Y):
        """Build from ``Y = X^{-1} = F F^T`` (must be positive definite)."""
        Y = 0.5 * (Y + Y.T)
        F = psd_sqrt(Y)
        lam, V = np.linalg.eigh(Y)
        if lam[0] <= 0:
            raise InvalidMatrix("ellipsoid shape must be positive definite")
        X = (V / lam) @ V.T
        width = float(np.sqrt(np.max(np.diag(Y))))
        return cls(0.5 * (X + X.T), F, width)

    @property
    def dim(self):
        return self.shape.shape[0]

    @property
    def inverse_shape(self):
        return self.factor @ self.factor

    def containment(self, A):
        """``a_j^T X a_j`` for every column; ``<= 1`` means inside."""
        A = as_matrix(A)
        if A.shape[0] != self.dim:
            raise DimError(f"ellipsoid has dimension {self.dim}, points have {A.shape[0]}")
        Z = np.linalg.solve(self.factor, A)
        return np.sum(Z * Z, axis=0)

    def contains(self, A, tol=1e-12):
        return bool(np.all(self.containment(A) <= 1.0 + tol))

    def coordinate_widths(self):
        return np.sqrt(np.diag(self.inverse_shape))


@dataclass(frozen=True)
class DualWitness:
    """Trace-one diagonal weights and the value ``||P^{1/2} A Q^{1/2}||_{S1}``.

    The squared value is a lower bound on the squared minimum width; the
    unnormalized column multiplier of the Lagrangian is ``value**2 * Q``.
    """

    P: np.ndarray
    Q: np.ndarray
    value: float


@dataclass
class SolveDiagnostics:
    iterations: int
    primal_value: float
    dual_value: float
    relative_gap: float
    converged: bool
    method: str = "barrier"
    delta: float = 0.0
    history: list = field(default_factory=list)


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for the ellipsoid solvers.

    ``max_iters`` counts Newton steps for the barrier method and ascent steps
    for the supergradient and multiplicative methods. ``delta=None`` selects
    the default perturbation ``1e-7 * (1 + max|A|)``.
    """

    tol: float = 1e-4
    max_iters: int = 50_000
    delta: float | None = None
    method: str = "barrier"
    step_a: float = 1.0
    step_b: float = 10.0

    def validate(self):
        if not self.tol > 0:
            raise InvalidParameter(f"tol must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise InvalidParameter(f"max_iters must be positive, got {self.max_iters}")
        if self.delta is not None and not self.delta > 0:
            raise InvalidParameter(f"delta must be positive, got {self.delta}")
        if self.method not in ("barrier", "supergradient"):
            raise InvalidParameter(f"unknown method {self.method!r}")
        return self


def relative_gap(primal, dual):
    return (primal - dual) / max(dual, 1e-12)


def dual_value(A, P, Q):
    """``||P^{1/2} A Q^{1/2}||_{S1}`` for trace-one diagonal weights."""
    A = as_matrix(A)
    m, n = A.shape
    if np.shape(P) != (m,) or np.shape(Q) != (n,):
        raise DimError(f"weights of shape {np.shape(P)}, {np.shape(Q)} do not fit a {m}x{n} matrix")
    P = check_weights(P, m, name="P")
    Q = check_weights(Q, n, name="Q")
    return nuclear_norm(np.sqrt(P)[:, None] * A * np.sqrt(Q)[None, :])


def _stationary_inverse_shape(A, P, R):
    """Solve ``Y P Y = A R A^T`` for ``Y`` (the inverse shape) in closed form."""
    m, n = A.shape
    p = np.maximum(P, 1e-10 / m)
    r = np.maximum(R, 1e-10 / n)
    sp = np.sqrt(p)
    M = (sp[:, None] * A * r) @ A.T * sp[None, :]
    root = psd_sqrt(0.5 * (M + M.T))
    return root / sp[:, None] / sp[None, :]


def recover_primal(A, P, R):
    """Ellipsoid from the stationarity condition of the Lagrangian.

    Parameters
    ----------
    A : (m, n) array of full row rank
    P : (m,) row weights
    R : (n,) nonnegative column multipliers (not necessarily trace one)

    The stationary shape is rescaled so the tightest column lies exactly on
    the boundary, which makes the result feasible whatever the weights.
    """
    A = as_matrix(A)
    m, n = A.shape
    P = check_weights(P, m, normalized=False, name="P")
    R = check_weights(R, n, normalized=False, name="R")
    if sigma_min(A.T) <= 1e-12 * max(1.0, float(np.max(np.abs(A)))):
        raise RankError(f"matrix has rank < {m}; apply full_rank_reduce first")
    Y = _stationary_inverse_shape(A, P, R)
    E = Ellipsoid.from_inverse_shape(Y)
    scale = float(np.max(E.containment(A)))
    return Ellipsoid.from_inverse_shape(Y * scale)


def _floor_spectrum(Y, rel=1e-12):
    """Add a multiple of ``I`` so ``lambda_min(Y) >= rel * max(diag Y)``.

    Growing ``Y`` only enlarges the body, so containment is preserved; rank
    perturbation can leave eigenvalues at rounding level otherwise.
    """
    Y = 0.5 * (Y + Y.T)
    floor = rel * float(np.max(np.diag(Y)))
    low = float(np.linalg.eigvalsh(Y)[0])
    if low < floor:
        Y = Y + (floor - low) * np.eye(Y.shape[0])
    return Y


def _scaled_to_contain(Y, A):
    """``Y`` multiplied so the worst column of ``A`` sits on the boundary."""
    L = np.linalg.cholesky(Y)
    Z = np.linalg.solve(L, A)
    worst = float(np.max(np.sum(Z * Z, axis=0)))
    if worst <= 0:
        return Y
    return Y * worst


# symmetric-basis helpers for the barrier Newton system. A symmetric direction
# D is written sum_k z_k D_k with D_k = e_a e_b^T + e_b e_a^T (a < b) or e_a e_a^T.
class _SymBasis:
    def __init__(self, m):
        self.m = m
        self.ia, self.ib = np.triu_indices(m)
        self.off = np.where(self.ia == self.ib, 1.0, 2.0)
        self.half = np.where(self.ia == self.ib, 0.5, 1.0)

    @property
    def size(self):
        return self.ia.size

    def coords(self, M):
        """Coefficients ``k -> tr(M D_k)`` for symmetric ``M``."""
        return M[self.ia, self.ib] * self.off

    def outer_coords(self, U):
        """``coords(u u^T)`` for every column ``u`` of ``U``; shape (size, cols)."""
        return U[self.ia, :] * U[self.ib, :] * self.off[:, None]

    def matrix(self, z):
        D = np.zeros((self.m, self.m))
        D[self.ia, self.ib] = z
        return D + np.triu(D, 1).T

    def sandwich(self, B):
        """Matrix of the bilinear form ``(D, D') -> tr(D B D')``, symmetrized."""
        a, b = self.ia, self.ib
        # D_l uses indices (c, d) = (a[l], b[l]); see module comment
        T = (
            B[np.ix_(b, a)] * (b[None, :] == a[:, None])
            + B[np.ix_(b, b)] * (a[None, :] == a[:, None])
            + B[np.ix_(a, a)] * (b[None, :] == b[:, None])
            + B[np.ix_(a, b)] * (a[None, :] == b[:, None])
        )
        K = self.half[:, None] * self.half[None, :] * T
        return 0.5 * (K + K.T)


def _barrier_state(Y, t, W):
    try:
        L = np.linalg.cholesky(Y)
    except np.linalg.LinAlgError:
        return None
    Ws = np.linalg.solve(L, W)
    w = 1.0 - np.sum(Ws * Ws, axis=0)
    s = t - np.diag(Y)
    if np.any(w <= 0) or np.any(s <= 0):
        return None
    return L, Ws, w, s


def _barrier_potential(state, t, weight):
    if state is None:
        return np.inf
    L, _, w, s = state
    return weight * t - np.log(s).sum() - np.log(w).sum() - 2.0 * np.log(np.diag(L)).sum()


def _barrier_solve(W, A_orig, opts):
    """Barrier path following on a full-rank normalized ``W``.

    Minimizes ``t`` over ``(Y, t)`` with ``Y_ii <= t`` and
    ``w_j^T Y^{-1} w_j <= 1``, plus a ``-log det Y`` term that keeps the
    scaled Hessian bounded below. Newton steps are taken in coordinates
    ``Y = L Z L^T`` around the current Cholesky factor. Dual weights come from
    the inverse slacks of the two constraint families.
    """
    m, n = W.shape
    basis = _SymBasis(m)
    d = basis.size
    r2 = float(np.max(np.sum(W * W, axis=0)))
    Y = 1.5 * r2 * np.eye(m)
    t = 3.0 * r2
    weight = (m + n) / t
    eye = np.eye(m)
    K_eye = basis.sandwich(eye)
    steps = 0
    history = []
    best = None
    n_orig = A_orig.shape[1]
    state = _barrier_state(Y, t, W)
    while True:
        for _ in range(200):
            L, Ws, w, s = state
            B2 = (Ws / w) @ Ws.T
            Lt = L.T
            gZ = -B2 + (Lt / s) @ Lt.T - eye
            g = np.concatenate([basis.coords(gZ), [weight - np.sum(1.0 / s)]])
            Gs = basis.outer_coords(Ws)
            H = np.zeros((d + 1, d + 1))
            H[:d, :d] = (Gs / w**2) @ Gs.T + 2.0 * basis.sandwich(B2) + K_eye
            C = np.vstack([-basis.outer_coords(Lt), np.ones((1, m))])
            H += (C / s**2) @ C.T
            try:
                step = -np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                step = -np.linalg.lstsq(H, g, rcond=None)[0]
            dec = float(-g @ step)
            steps += 1
            if dec / 2 < 1e-9 or steps >= opts.max_iters:
                break
            dZ = basis.matrix(step[:d])
            f0 = _barrier_potential(state, t, weight)
            a = 1.0
            while True:
                Yn = L @ (eye + a * dZ) @ L.T
                Yn = 0.5 * (Yn + Yn.T)
                tn = t + a * step[d]
                new_state = _barrier_state(Yn, tn, W)
                if _barrier_potential(new_state, tn, weight) <= f0 - 0.25 * a * dec:
                    break
                a *= 0.5
                if a < 1e-14:
                    new_state = None
                    break
            if new_state is None:
                break
            Y, t, state = Yn, tn, new_state
        L, Ws, w, s = state
        p = 1.0 / s
        p /= p.sum()
        r = 1.0 / w
        q = r[:n_orig] / r[:n_orig].sum()
        dual = nuclear_norm(np.sqrt(p)[:, None] * A_orig * np.sqrt(q)[None, :])
        candidates = [_scaled_to_contain(Y, A_orig)]
        try:
            Yr = _stationary_inverse_shape(W, p, r / r.sum() * dual**2)
            candidates.append(_scaled_to_contain(Yr, A_orig))
        except (np.linalg.LinAlgError, ValueError):
            pass
        Yb = min(candidates, key=lambda Z: np.max(np.diag(Z)))
        primal = float(np.sqrt(np.max(np.diag(Yb))))
        history.append((primal, dual))
        if best is None or relative_gap(primal, dual) < relative_gap(best[2], best[3]):
            best = (Yb, (p, q), primal, dual)
        if relative_gap(primal, dual) <= opts.tol or steps >= opts.max_iters:
            break
        weight *= 8.0
    return best, steps, history


def _supergradient_solve(W, A_orig, opts):
    """Projected supergradient ascent on ``2||P^{1/2} W R^{1/2}||_{S1} - tr R``."""
    m, n = W.shape
    n_orig = A_orig.shape[1]
    P = np.full(m, 1.0 / m)
    Q = np.full(n, 1.0 / n)
    c = nuclear_norm(np.sqrt(P)[:, None] * W * np.sqrt(Q)[None, :]) ** 2
    R = c * Q
    best = None
    best_primal = None
    best_dual = None
    history = []
    k = 0
    for k in range(1, opts.max_iters + 1):
        Y = _stationary_inverse_shape(W, P, R)
        try:
            Yf = _scaled_to_contain(Y, A_orig)
        except np.linalg.LinAlgError:
            break
        primal = float(np.sqrt(np.max(np.diag(Yf))))
        q = R[:n_orig] / max(R[:n_orig].sum(), 1e-300)
        if q.sum() == 0:
            q = np.full(n_orig, 1.0 / n_orig)
        dual = nuclear_norm(np.sqrt(P)[:, None] * A_orig * np.sqrt(q)[None, :])
        if best_primal is None or primal < best_primal[1]:
            best_primal = (Yf, primal)
        if best_dual is None or dual > best_dual[1]:
            best_dual = ((P.copy(), q), dual)
        history.append((best_primal[1], best_dual[1]))
        if relative_gap(best_primal[1], best_dual[1]) <= opts.tol:
            break
        X = np.linalg.inv(Y)
        gp = np.diag(Y).copy()
        gr = np.sum((X @ W) * W, axis=0) - 1.0
        eta = opts.step_a / (opts.step_b + k)
        gp = gp - gp @ P
        P = simplex_project(P + eta * gp / max(np.linalg.norm(gp), 1e-300))
        R = np.maximum(R + eta * c * gr / max(np.linalg.norm(gr), 1e-300), 0.0)
        if R.sum() == 0:
            R = c * np.full(n, 1.0 / n)
    best = (best_primal[0], best_dual[0], best_primal[1], best_dual[1])
    return best, k, history


def _prepare(A, delta):
    """Normalize and, if needed, perturb ``A`` to full row rank."""
    A = as_matrix(A, "A")
    scale = float(np.max(np.abs(A)))
    if scale == 0:
        raise InvalidMatrix("zero matrix: the minimum width is 0 and no ellipsoid attains it")
    if delta is None:
        delta = 1e-7 * (1.0 + scale)
    An = A / scale
    m, n = A.shape
    used = 0.0
    W = An
    if n < m or sigma_min(An.T) < delta / scale * 1e-3:
        W = full_rank_reduce(An, delta / scale)
        used = delta
    return A, An, W, scale, used


def solve_min_linf_ellipsoid(A, opts=None):
    """Minimum-width ellipsoid containing the columns of ``A``, with certificate.

    Returns
    -------
    ellipsoid : Ellipsoid
        Contains every column of ``A`` (checked; the tightest column lies on
        the boundary).
    witness : DualWitness
        Weights whose value lower-bounds the optimum.
    diagnostics : SolveDiagnostics
        ``converged`` is set only when the certified relative gap is at most
        ``opts.tol``; otherwise the best pair found is still returned.
    """
    opts = (opts or SolverOptions()).validate()
    A, An, W, scale, used = _prepare(A, opts.delta)
    solver = _barrier_solve if opts.method == "barrier" else _supergradient_solve
    (Y, (p, q), primal, dual), iters, history = solver(W, An, opts)
    ell = Ellipsoid.from_inverse_shape(_floor_spectrum(Y * scale**2))
    P = p / p.sum()
    Q = q / q.sum()
    value = nuclear_norm(np.sqrt(P)[:, None] * A * np.sqrt(Q)[None, :])
    width = ell.linf_width
    gap = relative_gap(width, value)
    diag = SolveDiagnostics(
        iterations=iters,
        primal_value=width,
        dual_value=value,
        relative_gap=gap,
        converged=bool(gap <= opts.tol),
        method=opts.method,
        delta=used,
        history=[(pr * scale, du * scale) for pr, du in history],
    )
    return ell, DualWitness(P, Q, value), diag


def solve_min_trace_ellipsoid(V, opts=None):
    """Ellipsoid of least ``tr(X^{-1}) = ||F||_HS^2`` containing the columns of ``V``.

    Multiplicative fixed-point iteration on the dual weights ``q``: with
    ``M = V diag(q) V^T`` and ``f = tr M^{1/2}``, set ``q_j <- q_j g_j / f``
    where ``g_j = v_j^T M^{-1/2} v_j``. The candidate primal is ``f M^{1/2}``
    scaled to contain every point; ``f**2`` is the dual value, so
    ``(max_j g_j - f) / f`` is the certified relative gap.

    Returns
    -------
    ellipsoid, R, diagnostics
        ``R = f**2 * q`` is the unnormalized dual multiplier.
    """
    opts = (opts or SolverOptions()).validate()
    V, Vn, W, scale, used = _prepare(V, opts.delta)
    m, n = W.shape
    n_orig = Vn.shape[1]
    q = np.full(n, 1.0 / n)
    history = []
    it = 0
    gap = np.inf
    for it in range(1, opts.max_iters + 1):
        M = (W * q) @ W.T
        lam, U = np.linalg.eigh(0.5 * (M + M.T))
        lam = np.maximum(lam, 1e-300)
        f = float(np.sum(np.sqrt(lam)))
        Z = U.T @ W
        g = np.sum(Z * Z / np.sqrt(lam)[:, None], axis=0)
        gap = (np.max(g) - f) / f
        history.append((f * np.max(g), f * f))
        if gap <= opts.tol:
            break
        q = q * g / f
        q /= q.sum()
    M = (W * q) @ W.T
    root = psd_sqrt(0.5 * (M + M.T))
    f = float(np.trace(root))
    Y = _floor_spectrum(_scaled_to_contain(f * root, Vn) * scale**2)
    ell = Ellipsoid.from_inverse_shape(Y)
    qo = q[:n_orig] / q[:n_orig].sum()
    dual = nuclear_norm(V * np.sqrt(qo)[None, :]) ** 2
    primal = float(np.trace(Y))
    rgap = relative_gap(primal, dual)
    diag = SolveDiagnostics(
        iterations=it,
        primal_value=primal,
        dual_value=dual,
        relative_gap=rgap,
        converged=bool(rgap <= opts.tol),
        method="multiplicative",
        delta=used,
        history=[(pr * scale**2, du * scale**2) for pr, du in history],
    )
    return ell, dual * qo, diag


def gaussian_width_mc(E, samples=10_000, seed=0):
    """Monte Carlo estimate of ``E ||F g||`` for standard Gaussian ``g``.

    Returns
    -------
    mean, stderr : float
    """
    if samples < 100:
        raise InvalidParameter(f"samples must be at least 100, got {samples}")
    rng = np.random.Generator(np.random.PCG64(seed))
    G = rng.standard_normal((samples, E.dim))
    vals = np.linalg.norm(G @ E.factor, axis=1)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))
