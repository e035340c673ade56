"""Dense linear-algebra primitives used throughout the package.

Matrices are plain ``numpy.ndarray`` objects of dtype float64; ``as_matrix``
is the single validation gate. Tolerances are relative to the spectral norm
with an absolute floor of ``ABS_FLOOR``.
"""

from dataclasses import dataclass
import hashlib

import numpy as np

from .errors import InvalidMatrix, InvalidParameter, NotPSD

ABS_FLOOR = 1e-12
PSD_CLAMP = 1e-6


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D float64 array (a copy only if needed)."""
    try:
        arr = np.asarray(M, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidMatrix(f"{name}: not numeric ({exc})") from None
    if arr.ndim != 2:
        raise InvalidMatrix(f"{name}: expected 2-D array, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidMatrix(f"{name}: empty shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name}: contains NaN or infinity")
    return arr


def check_weights(w, dim=None, normalized=True, name="weights", tol=1e-10):
    """Validate a diagonal weight vector (the diagonal of P, Q or R)."""
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1:
        raise InvalidParameter(f"{name}: expected 1-D weights, got shape {w.shape}")
    if dim is not None and w.shape[0] != dim:
        raise InvalidParameter(f"{name}: expected {dim} weights, got {w.shape[0]}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise InvalidParameter(f"{name}: weights must be finite and nonnegative")
    if normalized and abs(w.sum() - 1.0) > tol:
        raise InvalidParameter(f"{name}: weights sum to {w.sum():.17g}, expected 1")
    return w


@dataclass(frozen=True)
class SpectralDecomposition:
    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self):
        return (self.left_vectors * self.singular_values) @ self.right_vectors.T


def spectrum(M):
    """Thin SVD with nonincreasing singular values (all ``min(m, n)`` of them)."""
    M = as_matrix(M)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    return SpectralDecomposition(s, U, Vt.T)


def singular_values(M):
    return np.linalg.svd(as_matrix(M), compute_uv=False)


def nuclear_norm(M):
    """Sum of singular values, i.e. ``tr((M M^T)^{1/2})``."""
    return float(np.sum(singular_values(M)))


def spectral_norm(M):
    return float(singular_values(M)[0])


def sigma_min(M):
    """Smallest of the ``min(m, n)`` singular values (0 for wide rank-deficient input)."""
    M = np.asarray(M, dtype=np.float64)
    if M.shape[1] > M.shape[0]:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def _sym_eigh(M, name):
    M = as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise InvalidMatrix(f"{name}: not square, shape {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M - M.T)) > 1e-10 * scale:
        raise InvalidMatrix(f"{name}: not symmetric")
    M = 0.5 * (M + M.T)
    lam, V = np.linalg.eigh(M)
    norm2 = max(float(np.max(np.abs(lam))), 0.0)
    if lam[0] < -PSD_CLAMP * norm2 - ABS_FLOOR:
        raise NotPSD(f"{name}: eigenvalue {lam[0]:.3e} below -{PSD_CLAMP:g}*||M||_2")
    return np.clip(lam, 0.0, None), V


def psd_sqrt(M):
    """Principal square root of a symmetric PSD matrix.

    Slightly negative eigenvalues (down to ``-1e-6 * ||M||_2``) are clamped
    to zero; anything more negative raises ``NotPSD``.
    """
    lam, V = _sym_eigh(M, "psd_sqrt input")
    Y = (V * np.sqrt(lam)) @ V.T
    return 0.5 * (Y + Y.T)


def psd_inv_sqrt(M, floor=0.0):
    """``M^{-1/2}`` for symmetric positive definite ``M``; eigenvalues floored at ``floor``."""
    lam, V = _sym_eigh(M, "psd_inv_sqrt input")
    lam = np.maximum(lam, floor)
    if lam[0] <= 0:
        raise NotPSD("psd_inv_sqrt input is singular")
    Y = (V / np.sqrt(lam)) @ V.T
    return 0.5 * (Y + Y.T)


def simplex_project(v):
    """Euclidean projection of ``v`` onto the probability simplex.

    Sort-and-threshold algorithm: find the largest ``rho`` with
    ``u_rho > (sum_{i<=rho} u_i - 1) / rho`` over the sorted vector ``u``.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise InvalidParameter("simplex_project expects a nonempty 1-D vector")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / ks > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    w = np.maximum(v - theta, 0.0)
    # one renormalization pass removes the O(eps) drift in the sum
    return w / w.sum()


def _content_seed(A):
    digest = hashlib.sha256(np.ascontiguousarray(A).tobytes()).digest()
    return int.from_bytes(digest[:8], "little")


def full_rank_reduce(A, delta):
    """Return a matrix of rank ``m`` close to ``A``.

    If ``n < m``, ``m - n`` near-zero columns are appended first (entries
    drawn from ``[-delta, delta]``, original columns untouched). If the result
    is still rank deficient, every entry receives a perturbation in
    ``[-delta, delta]``. Randomness is seeded from a hash of the matrix
    contents, so repeated calls agree.
    """
    A = as_matrix(A)
    if not delta > 0:
        raise InvalidParameter(f"delta must be positive, got {delta}")
    m, n = A.shape
    rng = np.random.Generator(np.random.PCG64(_content_seed(A)))
    if n < m:
        A = np.hstack([A, delta * rng.uniform(-1.0, 1.0, size=(m, m - n))])
    norm = max(1.0, spectral_norm(A))
    threshold = delta * norm * 1e-3
    if sigma_min(A.T) >= threshold:
        return A
    for _ in range(32):
        B = A + delta * rng.uniform(-1.0, 1.0, size=A.shape)
        if sigma_min(B.T) >= threshold:
            return B
    raise RuntimeError("full_rank_reduce: perturbation failed to reach full rank")
