"""Optimal row + column decompositions at p = 1.

``m_1(x) = inf { ||Ry||_1 + ||Cz||_1 : y + z = x }`` is a nuclear-norm
program. It is solved by Douglas-Rachford splitting on the product space:
the prox of ``||Ry||_1 + ||Cz||_1`` is singular-value soft thresholding of the
two stacks, and the constraint is an affine projection (per-index averaging).
Weak duality with any ``u`` of row and column norm at most 1 gives a lower
bound ``Re sum Tr(u_i^* x_i)``, so every result carries a certified gap.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels, matcore
from .errors import CapExceeded, MaxIterExceeded, NoConvergence
from .profile import Profile, k_exact_1_inf, lp_norm, weak_lp
from .rowcol import GModel, OpSequence, c_profile, col_modulus, g_profile, r_profile, row_modulus

SIZE_CAP = 512
DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 5000
CHECK_EVERY = 10
STALL_WINDOW = 50


def _gram_fn(g, f):
    # f applied to a small Hermitian PSD Gram matrix; negative round-off is clamped.
    w, v, sweeps = kernels.herm_jacobi(np.ascontiguousarray(g), matcore.EIG_TOL, matcore.MAX_SWEEPS)
    if sweeps < 0:
        raise NoConvergence("Jacobi did not converge on a Gram matrix")
    lam = np.clip(w, 0.0, None)
    return (v * f(lam)) @ matcore.dagger(v)


def _gram_eigs(g):
    w, _, sweeps = kernels.herm_jacobi(np.ascontiguousarray(g), matcore.EIG_TOL, matcore.MAX_SWEEPS)
    if sweeps < 0:
        raise NoConvergence("Jacobi did not converge on a Gram matrix")
    return np.clip(w, 0.0, None)


def _rgram(a):
    return np.einsum("nij,nkj->ik", a, np.conj(a))


def _cgram(a):
    return np.einsum("nji,njk->ik", np.conj(a), a)


def _row_nuclear(a) -> float:
    return float(np.sum(np.sqrt(_gram_eigs(_rgram(a)))))


def _col_nuclear(a) -> float:
    return float(np.sum(np.sqrt(_gram_eigs(_cgram(a)))))


def _row_inf(a) -> float:
    return float(np.sqrt(np.max(_gram_eigs(_rgram(a)))))


def _col_inf(a) -> float:
    return float(np.sqrt(np.max(_gram_eigs(_cgram(a)))))


def _shrink(gam):
    def h(lam):
        out = np.zeros_like(lam)
        pos = lam > 0
        out[pos] = np.maximum(0.0, 1.0 - gam / np.sqrt(lam[pos]))
        return out
    return h


def _inv_sqrt(lam):
    out = np.zeros_like(lam)
    if lam.size:
        pos = lam > matcore.RANK_TOL ** 2 * np.max(lam)
        out[pos] = 1.0 / np.sqrt(lam[pos])
    return out


def svt_row(a, gam):
    """Soft-threshold the singular values of the row stack of ``a`` by ``gam``."""
    return _gram_fn(_rgram(a), _shrink(gam)) @ a


def svt_col(a, gam):
    """Soft-threshold the singular values of the column stack of ``a`` by ``gam``."""
    return a @ _gram_fn(_cgram(a), _shrink(gam))


def row_isometry(a):
    """Blocks of the polar isometry of the row stack, ``(RR^*)^(-1/2) R``."""
    return _gram_fn(_rgram(a), _inv_sqrt) @ a


def col_isometry(a):
    return a @ _gram_fn(_cgram(a), _inv_sqrt)


@dataclass
class DecompositionResult:
    y: OpSequence
    z: OpSequence
    primal: float
    dual_bound: float
    gap: float
    iterations: int
    u: OpSequence | None = None
    converged: bool = True
    stop_reason: str = "gap"
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    history: list = field(default_factory=list, repr=False)

    @property
    def relative_gap(self) -> float:
        return self.gap / self.primal if self.primal > 0 else 0.0


def objective(y: OpSequence, z: OpSequence) -> float:
    """``||Ry||_1 + ||Cz||_1``."""
    return _row_nuclear(y.items) + _col_nuclear(z.items)


def _bound(u, x):
    nrm = max(_row_inf(u), _col_inf(u))
    if nrm == 0.0:
        return 0.0, u
    u = u / nrm
    return float(np.real(np.vdot(u, x))), u


def dual_certificate(x: OpSequence, y: OpSequence, z: OpSequence, hint=None):
    """A dual element ``u`` with ``max(||Ru||_inf, ||Cu||_inf) = 1`` and its bound.

    Candidates are the polar isometries of the two stacks (the subgradients
    of the two nuclear norms), their average, and an optional ``hint`` such
    as the solver's running dual iterate. Each is rescaled to the unit ball
    of ``R_inf cap C_inf`` and the best bound ``Re sum Tr(u_i^* x_i)`` wins.
    The bound never exceeds ``m_1(x)``.
    """
    xa = x.items
    vy = row_isometry(y.items)
    wz = col_isometry(z.items)
    cands = [0.5 * (vy + wz), vy, wz]
    if hint is not None:
        cands.insert(0, np.asarray(hint, dtype=np.complex128))
    best, best_u = 0.0, np.zeros_like(xa)
    for c in cands:
        b, u = _bound(c, xa)
        if b > best:
            best, best_u = b, u
    return OpSequence(best_u), best


def _prox_f(wy, wz):
    return svt_row(wy, 1.0), svt_col(wz, 1.0)


def m1_solve(x: OpSequence, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
             size_cap: int = SIZE_CAP, record: bool = False) -> DecompositionResult:
    """Compute ``m_1(x)`` and a near-optimal ``(y, z)`` by Douglas-Rachford.

    The input is scaled so that ``max(||Rx||_inf, ||Cx||_inf) = 1`` and the
    iteration runs with unit step. The returned ``(y, z)`` satisfies
    ``y + z = x`` up to round-off. Stops when the certified gap drops below
    ``tol * primal``; if the certificate stalls, stops once the primal has
    not moved by more than ``tol / 100`` (relative) over the last 50
    iterations.
    Hitting ``max_iter`` issues :class:`MaxIterExceeded` and still returns.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if x.N * x.dim > size_cap:
        raise CapExceeded(f"N*d = {x.N * x.dim} exceeds the size cap {size_cap}")
    xa = np.asarray(x.items)
    s = max(_row_inf(xa), _col_inf(xa))
    if s == 0.0:
        zero = OpSequence(np.zeros_like(xa))
        return DecompositionResult(zero, zero, 0.0, 0.0, 0.0, 0, zero, True, "zero", tol, max_iter)
    xn = xa / s
    wy = 0.5 * xn
    wz = 0.5 * xn
    history = []
    primals = []
    best = None
    reason = "max_iter"
    it = 0
    for it in range(1, max_iter + 1):
        ay, az = _prox_f(wy, wz)
        ry = 2.0 * ay - wy
        rz = 2.0 * az - wz
        r = 0.5 * (ry + rz - xn)
        by = ry - r
        bz = rz - r
        wy = wy + by - ay
        wz = wz + bz - az
        primal = _row_nuclear(by) + _col_nuclear(bz)
        primals.append(primal)
        if it % CHECK_EVERY == 0 or it == max_iter:
            hint = 0.5 * ((wy - ay) + (wz - az))
            yb, zb = OpSequence(by), OpSequence(bz)
            u, bound = dual_certificate(OpSequence(xn), yb, zb, hint)
            if best is None or primal - bound < best[0] - best[1]:
                best = (primal, bound, by, bz, u.items)
            if record:
                history.append((it, primal, bound))
            if primal - bound <= tol * primal:
                reason = "gap"
                break
            if it >= STALL_WINDOW and abs(primals[-STALL_WINDOW] - primal) <= tol * 1e-2 * primal:
                reason = "stagnation"
                break
    primal, bound, by, bz, u = best
    converged = reason != "max_iter"
    if not converged:
        warnings.warn(f"m1_solve stopped at max_iter={max_iter} with relative gap "
                      f"{(primal - bound) / primal:.3e}", MaxIterExceeded, stacklevel=2)
    y = OpSequence(s * by)
    z = OpSequence(s * bz)
    return DecompositionResult(y, z, s * primal, s * bound, s * (primal - bound), it,
                               OpSequence(u), converged, reason, tol, max_iter, history)


def lemma36_truncate(x: OpSequence, y: OpSequence, z: OpSequence, A: float):
    """Cut the large spectral parts of ``|(Ry)^*|`` and ``|Cz|`` at level ``A``.

    With ``e = 1_[A, inf)(|(Ry)^*|)`` and ``f = 1_[A, inf)(|Cz|)`` returns
    ``y' = e' y f' + e x`` and ``z' = e' z f' + e' x f`` (primes denote
    complements). Then ``y' + z' = x``, the objective does not increase,
    and for ``A >= ||Gx||_inf`` both stacks have norm at most ``2A``.
    """
    if A <= 0:
        raise ValueError("A must be positive")
    d = x.dim
    eye = np.eye(d)
    e = matcore.spectral_projection(row_modulus(y), A, "above")
    f = matcore.spectral_projection(col_modulus(z), A, "above")
    ec, fc = eye - e, eye - f
    ya = ec @ y.items @ fc + e @ x.items
    za = ec @ z.items @ fc + ec @ x.items @ f
    return OpSequence(ya), OpSequence(za)


def g_inf_norm(x: OpSequence, model: GModel = GModel()) -> float:
    return lp_norm(g_profile(x, model), float("inf"))


def _breakpoints(*profiles: Profile) -> np.ndarray:
    pts = [np.cumsum(p.widths) for p in profiles if len(p)]
    pts = np.unique(np.concatenate(pts)) if pts else np.array([1.0])
    pts = pts[pts > 0]
    return np.r_[pts[0] * 0.5, pts]


def _k_ratios(num: Profile, den: Profile, t_grid):
    out = []
    for t in t_grid:
        a = k_exact_1_inf(num, t)
        b = k_exact_1_inf(den, t)
        out.append(a / b if b > 0 else (0.0 if a == 0 else float("inf")))
    return np.asarray(out)


def k_domination_check(x: OpSequence, result: DecompositionResult, t_grid=None,
                       model: GModel = GModel(), truncate: bool = True) -> dict:
    """Ratios ``K_t(Ry; 1, inf) / K_t(Gx; 1, inf)`` and the ``Cz`` analogue.

    The decomposition is first passed through :func:`lemma36_truncate` at
    ``A = ||Gx||_inf`` (this never increases the objective, so an optimal
    pair stays optimal). Without an explicit ``t_grid`` the ratios are taken
    at every breakpoint of the profiles involved, which gives the exact
    supremum since each K is piecewise linear in ``t``.
    """
    g = g_profile(x, model)
    y, z = result.y, result.z
    if truncate:
        A = lp_norm(g, float("inf"))
        if A > 0:
            y, z = lemma36_truncate(x, y, z, A)
    ry, cz = r_profile(y), c_profile(z)
    if t_grid is None:
        t_grid = _breakpoints(g, ry, cz)
    t_grid = np.asarray(t_grid, dtype=float)
    row = _k_ratios(ry, g, t_grid)
    col = _k_ratios(cz, g, t_grid)
    return {
        "t": t_grid,
        "row_ratios": row,
        "col_ratios": col,
        "sup_row": float(np.max(row)),
        "sup_col": float(np.max(col)),
        "sup": float(max(np.max(row), np.max(col))),
        "g_inf": float(lp_norm(g, float("inf"))),
        "truncated": truncate,
        "model": model.label,
    }


def weak_l1_khintchine(x: OpSequence, result: DecompositionResult | None = None,
                       model: GModel = GModel(), **solve_kw) -> dict:
    """Compare ``||Gx||_{1,inf}`` with ``||Ry||_{1,inf} + ||Cz||_{1,inf}``.

    ``(y, z)`` is an optimal decomposition (solved here unless given).
    The reported ``ratio`` is decomposition side over ``Gx`` side.
    """
    if result is None:
        result = m1_solve(x, **solve_kw)
    g = weak_lp(g_profile(x, model), 1.0)
    dec = weak_lp(r_profile(result.y), 1.0) + weak_lp(c_profile(result.z), 1.0)
    ratio = dec / g if g > 0 else (1.0 if dec == 0 else float("inf"))
    return {"g_weak1": g, "decomp_weak1": dec, "ratio": ratio,
            "m1": result.primal, "gap": result.gap, "model": model.label}
