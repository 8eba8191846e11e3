"""Constructive witnesses for four routine operator inequalities.

For PSD ``a, b``:

i.   ``a <= b``  gives a contraction ``c`` with ``a = c b c^*``;
ii.  ``a <= b``  gives a partial isometry ``u`` with ``a^2 <= u b^2 u^*``;
iii. ``alpha >= 1``: ``(a + b)^alpha <= 2^(alpha - 1) u (a^alpha + b^alpha) u^*``;
iv.  ``theta <= 1``: ``(a + b)^theta <= u a^theta u^* + v b^theta v^*``.

Each witness is built exactly the way the textbook proof builds it, and the
report records which step produced which matrix. The power-theorem harness
for K-functionals lives here too.
"""

from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import KernelMismatch, NotPSD
from .profile import INF, ConstantLedger, Profile, c_p_alpha, power_theorem_check

PSD_CHECK_TOL = 1e-10
ACCEPT_TOL = 1e-8
KERNEL_TOL = 1e-12


@dataclass
class WitnessReport:
    item: str
    witnesses: list
    labels: list
    violation: float
    contraction_excess: float
    isometry_defect: float = 0.0
    params: dict = field(default_factory=dict)

    def ok(self, tol=ACCEPT_TOL) -> bool:
        return (self.violation >= -tol and self.contraction_excess <= tol
                and self.isometry_defect <= 10 * tol)


def _herm(a):
    a = matcore.as_matrix(a)
    return 0.5 * (a + matcore.dagger(a))


def _min_eig(a) -> float:
    return float(matcore.herm_eig(_herm(a)).eigenvalues[-1])


def _norm(a) -> float:
    return matcore.opnorm(a) if np.any(a) else 0.0


def _excess(ws) -> float:
    return max([max(0.0, _norm(w) - 1.0) for w in ws] + [0.0])


def _iso_defect(u) -> float:
    return _norm(u @ matcore.dagger(u) @ u - u)


def _power(a, s):
    # eigenvalues at round-off level are exact zeros; lam**s with s < 1 would inflate them
    def f(lam):
        out = np.zeros_like(lam)
        if lam.size:
            keep = lam > KERNEL_TOL * lam.max()
            out[keep] = lam[keep] ** s
        return out
    return matcore.psd_fn(a, f)


def _sqrt(a):
    return _power(a, 0.5)


def _check_order(a, b, tol=PSD_CHECK_TOL):
    scale = max(_norm(b), 1e-300)
    low = _min_eig(b - a)
    if low < -tol * scale:
        raise NotPSD(f"b - a has eigenvalue {low:.3e}; need a <= b")


def witness_i(a, b, rank_tol=matcore.RANK_TOL) -> WitnessReport:
    """``c = a^(1/2) b^(-1/2)`` (Moore-Penrose on the support of ``b``).

    ``violation`` is minus the relative residual ``||a - c b c^*|| / ||b||``.
    """
    a, b = _herm(a), _herm(b)
    _check_order(a, b)
    scale = max(_norm(b), 1e-300)
    s_b = matcore.support_projection(b, rank_tol)
    if _norm(a - s_b @ a @ s_b) > 1e-8 * scale:
        raise KernelMismatch("ker b is not contained in ker a")
    c = _sqrt(a) @ matcore.pseudo_sqrt_inv(b, rank_tol)
    res = _norm(a - c @ b @ matcore.dagger(c)) / scale
    return WitnessReport("i", [c], ["c = a^1/2 b^-1/2 (limit of c_eps)"], -res, _excess([c]))


def witness_ii(a, b, rank_tol=matcore.RANK_TOL) -> WitnessReport:
    """``u`` from the polar decomposition ``a^(1/2) b^(1/2) = u |a^(1/2) b^(1/2)|``."""
    a, b = _herm(a), _herm(b)
    _check_order(a, b)
    u = matcore.polar(_sqrt(a) @ _sqrt(b), rank_tol).isometry
    b2 = b @ b
    scale = max(_norm(b) ** 2, 1e-300)
    viol = _min_eig(u @ b2 @ matcore.dagger(u) - a @ a) / scale
    return WitnessReport("ii", [u], ["u: polar part of a^1/2 b^1/2"], min(viol, 0.0),
                         _excess([u]), _iso_defect(u))


def _iii(a, b, alpha):
    # returns (u, steps) with (a+b)^alpha <= 2^(alpha-1) u (a^alpha + b^alpha) u^*
    d = a.shape[0]
    if alpha <= 2.0:
        return np.eye(d, dtype=np.complex128), [f"u = 1 (operator convexity, alpha={alpha:g})"]
    half = alpha / 2.0
    u, steps = _iii(a, b, half)
    lhs = _power(a + b, half)
    rhs = 2.0 ** (half - 1.0) * u @ (_power(a, half) + _power(b, half)) @ matcore.dagger(u)
    rhs = _herm(rhs)
    # (a+b)^half <= rhs can fail by round-off; shift rhs by the measured defect
    slack = min(_min_eig(rhs - lhs), 0.0)
    rhs = rhs - slack * np.eye(d)
    v = matcore.polar(_sqrt(lhs) @ _sqrt(rhs)).isometry
    return v @ u, steps + [f"v from item ii at alpha={half:g}, compose vu (alpha={alpha:g})"]


def witness_iii(a, b, alpha: float) -> WitnessReport:
    """Operator convexity for ``alpha <= 2``, then doubling through item ii.

    For ``alpha > 2`` the witness is the product ``v_k ... v_1`` of the
    partial isometries produced at each doubling step. It is a contraction
    but need not itself be a partial isometry.
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    a, b = _herm(a), _herm(b)
    u, steps = _iii(a, b, float(alpha))
    lhs = _power(a + b, alpha)
    rhs = 2.0 ** (alpha - 1.0) * u @ (_power(a, alpha) + _power(b, alpha)) @ matcore.dagger(u)
    scale = max(_norm(a + b) ** alpha, 1e-300)
    viol = _min_eig(rhs - lhs) / scale
    return WitnessReport("iii", [u], steps, min(viol, 0.0), _excess([u]),
                         _iso_defect(u) if alpha <= 4 else 0.0, {"alpha": alpha})


def sharpness_probe_iii(alpha: float, d: int = 2) -> float:
    """Relative gap between the two sides of item iii at ``a = b = 1``.

    Both sides equal ``2^alpha``, so the constant ``2^(alpha-1)`` cannot be
    lowered; the return value should be zero up to round-off.
    """
    eye = np.eye(d, dtype=np.complex128)
    rep = witness_iii(eye, eye, alpha)
    u = rep.witnesses[0]
    lhs = _power(2.0 * eye, alpha)
    rhs = 2.0 ** (alpha - 1.0) * u @ (2.0 * eye) @ matcore.dagger(u)
    return _norm(rhs - lhs) / 2.0 ** alpha


def witness_iv(a, b, theta: float, rank_tol=matcore.RANK_TOL) -> WitnessReport:
    """Jensen-type witness: ``x = a + b``, ``alpha = a^(1/2) x^(-1/2)``,
    ``beta = b^(1/2) x^(-1/2)``; ``u^*`` and ``v^*`` are the polar parts of
    ``alpha x^(theta/2)`` and ``beta x^(theta/2)``.
    """
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    a, b = _herm(a), _herm(b)
    x = a + b
    xi = matcore.pseudo_sqrt_inv(x, rank_tol)
    fa = _sqrt(a) @ xi
    fb = _sqrt(b) @ xi
    xt2 = _power(x, theta / 2.0)
    u = matcore.dagger(matcore.polar(fa @ xt2, rank_tol).isometry)
    v = matcore.dagger(matcore.polar(fb @ xt2, rank_tol).isometry)
    rhs = u @ _power(a, theta) @ matcore.dagger(u) + v @ _power(b, theta) @ matcore.dagger(v)
    scale = max(_norm(x) ** theta, 1e-300)
    viol = _min_eig(rhs - _power(x, theta)) / scale
    return WitnessReport("iv", [fa, fb, u, v],
                         ["alpha = a^1/2 x^-1/2", "beta = b^1/2 x^-1/2",
                          "u: adjoint polar part of alpha x^theta/2",
                          "v: adjoint polar part of beta x^theta/2"],
                         min(viol, 0.0), _excess([fa, fb, u, v]),
                         max(_iso_defect(u), _iso_defect(v)), {"theta": theta})


def random_psd(d: int, rng, rank: int | None = None, complex_: bool = True) -> np.ndarray:
    """``g g^*`` for a ``d x rank`` Gaussian ``g``, scaled to unit norm."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank))
    if complex_:
        g = g + 1j * rng.standard_normal((d, rank))
    a = g @ matcore.dagger(g)
    n = _norm(a)
    return _herm(a / n) if n > 0 else _herm(a)


def random_ordered_pair(d: int, rng, rank: int | None = None):
    """``(a, b)`` with ``0 <= a <= b``: ``a = b^(1/2) rho b^(1/2)`` for a PSD contraction ``rho``."""
    b = random_psd(d, rng, rank)
    rho = random_psd(d, rng) * rng.uniform(0.0, 1.0)
    r = matcore.sqrtm_psd(b)
    return _herm(r @ rho @ r), b


def run_suite(trials: int = 200, seed: int = 7, d_max: int = 8) -> dict:
    """Run all four items on seeded random pairs; returns the reports per item."""
    rng = np.random.default_rng(seed)
    out = {"i": [], "ii": [], "iii": [], "iv": []}
    for _ in range(trials):
        d = int(rng.integers(1, d_max + 1))
        rank = int(rng.integers(1, d + 1))
        a, b = random_ordered_pair(d, rng, rank)
        out["i"].append(witness_i(a, b))
        out["ii"].append(witness_ii(a, b))
        a2 = random_psd(d, rng, int(rng.integers(1, d + 1)))
        b2 = random_psd(d, rng, int(rng.integers(1, d + 1))) * rng.uniform(0.1, 2.0)
        alpha = float(rng.choice([1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0]))
        out["iii"].append(witness_iii(a2, b2, alpha))
        theta = float(rng.uniform(0.05, 1.0))
        out["iv"].append(witness_iv(a2, b2, theta))
    return out


def suite_summary(reports: dict, tol=ACCEPT_TOL) -> dict:
    return {item: {"trials": len(rs), "passed": sum(r.ok(tol) for r in rs),
                   "worst_violation": min(r.violation for r in rs),
                   "worst_excess": max(r.contraction_excess for r in rs)}
            for item, rs in reports.items()}


def random_profile(rng, steps: int = 10) -> Profile:
    vals = np.sort(rng.exponential(size=steps))[::-1]
    wids = rng.uniform(0.1, 2.0, size=steps)
    return Profile.from_arrays(vals, wids)


POWER_GRID = [(p, INF, a) for p in (0.5, 1.0, 2.0) for a in (0.5, 2.0)]
# finite q: the proxy is only equivalent to K, so these rows are report-only
POWER_GRID_FINITE_Q = [(p, 4.0 * p, a) for p in (0.5, 1.0, 2.0) for a in (0.5, 2.0)]


def power_theorem_suite(seed: int = 7, trials: int = 50, t_grid=None,
                        ledger: ConstantLedger | None = None, grid=POWER_GRID) -> dict:
    """Power-theorem ratios over random 10-step profiles and the ``(p, q, alpha)`` grid.

    Each row carries the min and max ratio; ``bounded`` checks the proven
    direction ``ratio <= c_{p,alpha} * holmstedt_slack`` and ``in_envelope``
    checks the two-sided envelope ``[1/4, 4]``.
    """
    ledger = ledger or ConstantLedger()
    rng = np.random.default_rng(seed)
    t_grid = np.geomspace(1e-3, 1e2, 41) if t_grid is None else np.asarray(t_grid, dtype=float)
    rows = []
    for k in range(trials):
        f = random_profile(rng)
        for p, q, a in grid:
            r = power_theorem_check(f, p, q, a, t_grid)
            bound = c_p_alpha(p, a) * ledger.holmstedt_slack
            rows.append({"trial": k, "p": p, "q": q, "alpha": a,
                         "min": float(r.min()), "max": float(r.max()),
                         "c_p_alpha": c_p_alpha(p, a),
                         "bounded": bool(r.max() <= bound * (1 + 1e-12)),
                         "in_envelope": bool(r.min() >= 0.25 and r.max() <= 4.0)})
    return {"rows": rows,
            "min": min(r["min"] for r in rows), "max": max(r["max"] for r in rows),
            "all_bounded": all(r["bounded"] for r in rows),
            "all_in_envelope": all(r["in_envelope"] for r in rows)}
