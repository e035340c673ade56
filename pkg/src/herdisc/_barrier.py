"""Small dense log-barrier solver for linear matrix inequalities.

Solves ``min c.x`` subject to ``F_b(x) = F_b0 + sum_l x_l F_bl > 0`` for a
handful of symmetric blocks. Problem sizes here are tiny (a few hundred
variables at most), so the Newton system is formed densely and solved through
an eigendecomposition, which tolerates the rank-deficient Hessians that arise
when the optimum sits on a singular face.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class BarrierResult:
    x: np.ndarray
    newton_steps: int
    barrier_weight: float
    converged: bool
    # per block, the inverse slack F_b(x)^{-1}; scaled by 1/weight it is a
    # near-optimal dual variable for that block
    inverse_slacks: list


def _factor(blocks, x):
    out = []
    for F0, Fl in blocks:
        F = F0 + np.tensordot(x, Fl, 1)
        try:
            L = np.linalg.cholesky(F)
        except np.linalg.LinAlgError:
            return None
        out.append(L)
    return out


def _potential(c, x, weight, Ls):
    if Ls is None:
        return np.inf
    return weight * (c @ x) - sum(2.0 * np.log(np.diag(L)).sum() for L in Ls)


def lmi_minimize(c, blocks, x0, tol=1e-8, growth=20.0, weight0=1.0, max_newton=2000):
    """Path-following barrier method from a strictly feasible ``x0``.

    ``blocks`` is a list of ``(F0, Fl)`` with ``F0`` of shape ``(d, d)`` and
    ``Fl`` of shape ``(len(x0), d, d)``. Stops when the barrier parameter
    bound ``nu / weight`` on the duality gap drops below ``tol``.
    """
    c = np.asarray(c, dtype=float)
    x = np.array(x0, dtype=float)
    nu = sum(F0.shape[0] for F0, _ in blocks)
    weight = weight0
    steps = 0
    Ls = _factor(blocks, x)
    if Ls is None:
        raise ValueError("lmi_minimize: starting point is not strictly feasible")
    while True:
        final = nu / weight < tol * growth
        for _ in range(100):
            g = weight * c.copy()
            H = np.zeros((x.size, x.size))
            for (F0, Fl), L in zip(blocks, Ls):
                Li = np.linalg.inv(L)
                G = Li @ Fl @ Li.T
                g -= np.einsum("kii->k", G)
                Gf = G.reshape(x.size, -1)
                H += Gf @ Gf.T
            ev, V = np.linalg.eigh(H)
            keep = ev > ev[-1] * 1e-15
            step = -(V[:, keep] / ev[keep]) @ (V[:, keep].T @ g)
            dec = -g @ step
            steps += 1
            if dec < (1e-10 if final else 1e-3):
                break
            a = 1.0 if dec < 0.25 else 1.0 / (1.0 + np.sqrt(dec))
            f0 = _potential(c, x, weight, Ls)
            while True:
                Ln = _factor(blocks, x + a * step)
                if _potential(c, x + a * step, weight, Ln) <= f0 - 0.25 * a * dec:
                    break
                a *= 0.5
                if a < 1e-14:
                    Ln = None
                    break
            if Ln is None:
                break
            x = x + a * step
            Ls = Ln
            if steps >= max_newton:
                break
        done = nu / weight < tol
        if done or steps >= max_newton:
            inv = []
            for L in Ls:
                Li = np.linalg.inv(L)
                inv.append(Li.T @ Li)
            return BarrierResult(x, steps, weight, done, inv)
        weight *= growth
