"""End-to-end certified bounds on hereditary (vector) discrepancy.

``approximate_herdisc`` solves the minimum-width ellipsoid problem, uses the
dual weights to pick a column subset, and reports

* ``mu``: width of a feasible ellipsoid, an upper bound on the hereditary
  vector discrepancy;
* ``alpha``: ``sqrt(|S|) sigma_min(P^{1/2} A|_S)`` for the extracted subset, a
  lower bound on the same quantity (and hence on herdisc).

``verify_report`` recomputes every number from the raw certificates.
"""

from dataclasses import asdict, dataclass, field
import json
import math

import numpy as np

from .bounds import (
    HERDISC_ORACLE_MAX_N,
    DET_MAX_SUBMATRICES,
    default_disc_cap,
    det_lb_exact,
    disc_exact,
    herdisc_exact,
    hvecdisc_exhaustive,
    spectral_lb_value,
    vecdisc_solve,
)
from .ellipsoid import Ellipsoid, SolverOptions, solve_min_linf_ellipsoid
from .errors import ContractError, InvalidMatrix, InvalidParameter
from .linalg import as_matrix, nuclear_norm
from .restricted import extract_spectral_subset


@dataclass(frozen=True)
class AlgorithmOptions:
    """Settings for ``approximate_herdisc``.

    Attributes
    ----------
    tol : float
        Target relative duality gap of the ellipsoid solve.
    max_iters : int
        Newton-step budget of the ellipsoid solve.
    delta : float or None
        Perturbation used for rank-deficient input; ``None`` means
        ``1e-7 * (1 + max|A|)``.
    oracle_max_n : int or None
        Largest ``n`` for the exact disc oracle; ``None`` reads
        ``HERDISC_ORACLE_MAX_N`` from the environment, defaulting to 20.
    herdisc_oracle_max_n, vecdisc_oracle_max_n, hvecdisc_oracle_max_n : int
        Caps for the other exact oracles.
    det_max_submatrices : int
        Largest number of square submatrices the determinant bound enumerates.
    N_cap : int
        Denominator used to round column weights.
    seed : int
        Recorded in the report; every stage is deterministic.
    oracles : bool
        Run the exact oracles that fit within their caps.
    """

    tol: float = 1e-4
    max_iters: int = 50_000
    delta: float | None = None
    oracle_max_n: int | None = None
    herdisc_oracle_max_n: int = HERDISC_ORACLE_MAX_N
    vecdisc_oracle_max_n: int = 12
    hvecdisc_oracle_max_n: int = 5
    det_max_submatrices: int = DET_MAX_SUBMATRICES
    N_cap: int = 2**16
    epsilon: float = 0.5
    seed: int = 0
    oracles: bool = True

    def validate(self):
        for name in ("tol", "max_iters", "herdisc_oracle_max_n", "vecdisc_oracle_max_n",
                     "hvecdisc_oracle_max_n", "det_max_submatrices", "N_cap"):
            if not getattr(self, name) > 0:
                raise InvalidParameter(f"{name} must be positive, got {getattr(self, name)}")
        if self.oracle_max_n is not None and self.oracle_max_n < 1:
            raise InvalidParameter(f"oracle_max_n must be positive, got {self.oracle_max_n}")
        if self.delta is not None and not self.delta > 0:
            raise InvalidParameter(f"delta must be positive, got {self.delta}")
        if not 0 < self.epsilon < 1:
            raise InvalidParameter(f"epsilon must lie in (0, 1), got {self.epsilon}")
        return self

    @property
    def disc_cap(self):
        return default_disc_cap() if self.oracle_max_n is None else self.oracle_max_n


@dataclass
class BoundsReport:
    m: int
    n: int
    mu: float
    alpha: float
    relative_gap: float
    converged: bool
    delta: float
    guarantee_ratio_vec: float
    guarantee_ratio_disc: float
    alpha_theory: float
    dual_witness: dict
    subset_witness: dict
    extraction: dict
    ellipsoid: dict
    diagnostics: dict
    oracle_values: dict = field(default_factory=dict)
    seed: int = 0

    def to_dict(self):
        return asdict(self)


def _ratio(num, den):
    return num / den if den > 0 else math.inf


def _trace_dict(trace):
    return {
        "buckets": {str(k): v for k, v in trace.buckets.items()},
        "bucket_mass": {str(k): v for k, v in trace.bucket_mass.items()},
        "tail": trace.tail,
        "chosen_k": trace.chosen_k,
        "tau": trace.tau,
        "bucket_rank": trace.bucket_rank,
        "projector_basis": trace.projector_basis,
        "epsilon": trace.epsilon,
        "selected": trace.selected,
        "rip_k": trace.rip_k,
        "rip_subset": trace.rip_subset,
        "certified": trace.certified,
        "required": trace.required,
        "nuclear": trace.nuclear,
    }


def run_oracles(A, opts, subset=None):
    """Exact reference values for every oracle whose cap admits ``A``; ``None`` otherwise."""
    m, n = A.shape
    out = {k: None for k in ("disc", "herdisc", "herdisc_subset", "vecdisc", "vecdisc_subset",
                             "hvecdisc", "det_lb")}
    if n <= opts.disc_cap:
        out["disc"] = disc_exact(A, opts.disc_cap)[0]
    if n <= opts.herdisc_oracle_max_n:
        out["herdisc"], out["herdisc_subset"] = herdisc_exact(A, opts.herdisc_oracle_max_n)
    if n <= opts.vecdisc_oracle_max_n:
        out["vecdisc"] = vecdisc_solve(A).value
    if subset is not None and len(subset) <= opts.vecdisc_oracle_max_n:
        out["vecdisc_subset"] = vecdisc_solve(A[:, subset]).value
    if n <= opts.hvecdisc_oracle_max_n:
        out["hvecdisc"] = hvecdisc_exhaustive(A, opts.hvecdisc_oracle_max_n)[0]
    count = sum(math.comb(m, k) * math.comb(n, k) for k in range(1, min(m, n) + 1))
    if count <= opts.det_max_submatrices:
        out["det_lb"] = det_lb_exact(A, opts.det_max_submatrices)
    return out


def approximate_herdisc(A, opts=None):
    """Certified sandwich ``alpha <= hvecdisc(A) <= mu`` with diagnostics.

    Raises
    ------
    InvalidMatrix
        ``A`` is not a finite nonzero matrix.
    """
    A = as_matrix(A, "A")
    opts = (opts or AlgorithmOptions()).validate()
    if not np.any(A):
        raise InvalidMatrix("matrix is zero; every bound is 0")
    m, n = A.shape
    ell, witness, diag = solve_min_linf_ellipsoid(
        A, SolverOptions(tol=opts.tol, max_iters=opts.max_iters, delta=opts.delta)
    )
    P, Q = witness.P, witness.Q
    PA = np.sqrt(P)[:, None] * A
    try:
        S, trace = extract_spectral_subset(PA, Q, opts.epsilon, opts.N_cap)
        contract_ok = True
    except ContractError as exc:
        # keep going with the best subset found; the report records the shortfall
        S, trace = exc.subset, exc.trace
        contract_ok = False
    alpha = spectral_lb_value(A, S, P)
    mu = ell.linf_width
    log_m = math.log2(m) if m > 1 else 1.0
    oracle_values = run_oracles(A, opts, S) if opts.oracles else {}
    if oracle_values.get("herdisc") is not None:
        oracle_values["herdisc_constant"] = oracle_values["herdisc"] / (math.sqrt(2 * math.log(2 * m)) * mu)
    return BoundsReport(
        m=m,
        n=n,
        mu=mu,
        alpha=alpha,
        relative_gap=diag.relative_gap,
        converged=diag.converged,
        delta=diag.delta,
        guarantee_ratio_vec=_ratio(mu, alpha),
        guarantee_ratio_disc=_ratio(math.sqrt(2 * math.log(2 * m)) * mu, alpha),
        alpha_theory=mu / (16.0 * log_m),
        dual_witness={"P": P, "Q": Q, "value": witness.value},
        subset_witness={"subset": list(S), "row_weights": P, "value": alpha},
        extraction={**_trace_dict(trace), "contract_met": contract_ok},
        ellipsoid={"inverse_shape": ell.inverse_shape, "linf_width": mu},
        diagnostics={
            "iterations": diag.iterations,
            "primal_value": diag.primal_value,
            "dual_value": diag.dual_value,
            "relative_gap": diag.relative_gap,
            "converged": diag.converged,
            "method": diag.method,
            "history": [list(h) for h in diag.history],
        },
        oracle_values=oracle_values,
        seed=opts.seed,
    )


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    bound: float


@dataclass
class Verdict:
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]


def _get(report, key):
    return report[key] if isinstance(report, dict) else getattr(report, key)


def verify_report(A, report, tol=1e-8):
    """Re-derive every certificate in ``report`` (a ``BoundsReport`` or its dict form)."""
    A = as_matrix(A, "A")
    scale = max(1.0, float(np.max(np.abs(A))))
    slack = tol * scale
    checks = []
    ell_d = _get(report, "ellipsoid")
    Y = np.asarray(ell_d["inverse_shape"], dtype=float)
    mu = float(_get(report, "mu"))
    try:
        ell = Ellipsoid.from_inverse_shape(Y)
        worst = float(np.max(ell.containment(A)))
        width = ell.linf_width
    except (ValueError, np.linalg.LinAlgError):
        worst, width = math.inf, math.inf
    checks.append(Check("ellipsoid_contains_columns", worst <= 1 + 1e-9, worst, 1.0))
    checks.append(Check("mu_matches_ellipsoid", abs(width - mu) <= slack, mu, width))
    dw = _get(report, "dual_witness")
    P = np.asarray(dw["P"], dtype=float)
    Q = np.asarray(dw["Q"], dtype=float)
    weights_ok = (
        P.shape == (A.shape[0],) and Q.shape == (A.shape[1],)
        and abs(P.sum() - 1) <= 1e-10 and abs(Q.sum() - 1) <= 1e-10
        and P.min() >= 0 and Q.min() >= 0
    )
    checks.append(Check("dual_weights_trace_one", bool(weights_ok), float(P.sum()), 1.0))
    dual = nuclear_norm(np.sqrt(np.abs(P))[:, None] * A * np.sqrt(np.abs(Q))[None, :]) if weights_ok else math.nan
    checks.append(Check("dual_value_matches", abs(dual - float(dw["value"])) <= slack, float(dw["value"]), dual))
    checks.append(Check("weak_duality", dual <= width + slack, dual, width))
    sw = _get(report, "subset_witness")
    alpha = float(_get(report, "alpha"))
    try:
        alpha_re = spectral_lb_value(A, sw["subset"], np.asarray(sw["row_weights"], dtype=float))
    except ValueError:
        alpha_re = math.nan
    checks.append(Check("alpha_matches_subset", abs(alpha_re - alpha) <= slack, alpha, alpha_re))
    checks.append(Check("alpha_below_mu", alpha <= max(dual, width) + slack, alpha, max(dual, width)))
    return Verdict(checks)


def _fmt_float(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def to_json(obj, indent=2, _level=0):
    """Deterministic JSON with 17 significant digits; non-finite floats become ``null``."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, BoundsReport):
        obj = obj.to_dict()
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json_str(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    return _json_str(str(obj))


def _json_str(s):
    return json.dumps(s)
