"""The factorisation ``x = alpha u + u beta`` read off an optimal decomposition.

Given ``x = y + z`` optimal for ``m_1``, put ``alpha = |(Ry)^*|`` and
``beta = |Cz|``, write ``y = alpha v`` and ``z = w beta``, and glue
``u = v + (1 - e) w + (1 - e) u_d (1 - f)`` where ``e, f`` are the supports
of ``alpha, beta`` and ``u_d`` is the dual certificate of the decomposition.
At exact optimality ``v f = e w``, which makes ``alpha u = y`` and
``u beta = z``; numerically that identity is only approximate and is
reported as ``r_consistency``. The corner taken from ``u_d`` is what keeps
``sum u_i u_i^*`` and ``sum u_i^* u_i`` below 1: leaving it at zero can push
the row norm above 1.
"""

from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .decomp import DecompositionResult, m1_solve, objective
from .errors import DegenerateSupport
from .profile import k_proxy, profile_of
from .rowcol import GModel, OpSequence, col_gram, g_profile, row_gram

SUPPORT_RANK_TOL = 1e-8


@dataclass
class FactorizationResult:
    alpha: np.ndarray
    beta: np.ndarray
    u: OpSequence
    r_factor: float
    r_consistency: float
    r_row: float
    r_col: float
    r_y: float = 0.0
    r_z: float = 0.0
    rank_tol: float = SUPPORT_RANK_TOL
    provenance: dict = field(default_factory=dict)
    e: np.ndarray | None = None
    f: np.ndarray | None = None


def _op(a) -> float:
    return matcore.opnorm(a) if np.any(a) else 0.0


def _top(a) -> float:
    return float(matcore.herm_eig(a).eigenvalues[0])


def _support_and_pinv(a, cut):
    # support projection and Moore-Penrose inverse of a PSD matrix, eigenvalues <= cut dropped
    eig = matcore.herm_eig(a)
    keep = eig.eigenvalues > cut
    v = eig.basis[:, keep]
    lam = eig.eigenvalues[keep]
    proj = v @ matcore.dagger(v)
    inv = (v / lam) @ matcore.dagger(v)
    return 0.5 * (proj + matcore.dagger(proj)), 0.5 * (inv + matcore.dagger(inv))


def _band_violation(gram, support) -> float:
    # how far gram falls outside [support, 1] in the Loewner order
    top = matcore.herm_eig(gram).eigenvalues[0]
    diff = gram - support
    low = matcore.herm_eig(0.5 * (diff + matcore.dagger(diff))).eigenvalues[-1]
    return float(max(0.0, top - 1.0, -low))


def extract_factorization(x: OpSequence, decomposition: DecompositionResult,
                          rank_tol: float = SUPPORT_RANK_TOL) -> FactorizationResult:
    """Build ``(alpha, beta, u)`` from a decomposition and measure every identity.

    Residuals (operator norms, maxima over ``i``):

    * ``r_factor``: ``x_i - alpha u_i - u_i beta``;
    * ``r_consistency``: ``v_i f - e w_i``;
    * ``r_row``, ``r_col``: distance of ``sum u_i u_i^*`` from ``[e, 1]`` and of
      ``sum u_i^* u_i`` from ``[f, 1]``;
    * ``r_y``, ``r_z``: ``alpha u_i - y_i`` and ``u_i beta - z_i``.
    """
    y, z = decomposition.y, decomposition.z
    d = x.dim
    alpha = matcore.sqrtm_psd(row_gram(y))
    beta = matcore.sqrtm_psd(col_gram(z))
    # One cutoff for both supports, relative to the larger modulus. It never
    # drops below the solver's accuracy: the objective is certified only to
    # relative precision tol (and absolute precision gap), so eigenvalues under
    # that level cannot be told apart from zero.
    top = max(_top(alpha), _top(beta))
    if top == 0.0:
        if np.any(x.items):
            raise DegenerateSupport("alpha and beta vanish but x does not")
        zero = np.zeros((d, d), dtype=np.complex128)
        return FactorizationResult(zero, zero, OpSequence(np.zeros_like(x.items)),
                                   0.0, 0.0, 0.0, 0.0, rank_tol=rank_tol, e=zero, f=zero)
    solver_tol = decomposition.tol if decomposition.tol is not None else 0.0
    cut = max(rank_tol, solver_tol) * top
    cut = max(cut, decomposition.gap)
    eye = np.eye(d)
    e, a_plus = _support_and_pinv(alpha, cut)
    f, b_plus = _support_and_pinv(beta, cut)
    v = a_plus @ y.items
    w = z.items @ b_plus
    u = v + (eye - e) @ w
    if decomposition.u is not None:
        # the free corner (1 - e) u (1 - f) comes from the dual certificate
        u = u + (eye - e) @ decomposition.u.items @ (eye - f)
    au = alpha @ u
    ub = u @ beta
    r_factor = max(_op(xi) for xi in x.items - au - ub)
    r_cons = max(_op(t) for t in v @ f - e @ w)
    r_y = max(_op(t) for t in au - y.items)
    r_z = max(_op(t) for t in ub - z.items)
    us = OpSequence(u)
    r_row = _band_violation(row_gram(us), e)
    r_col = _band_violation(col_gram(us), f)
    prov = {"primal": decomposition.primal, "gap": decomposition.gap,
            "iterations": decomposition.iterations, "tol": decomposition.tol,
            "rank_tol": rank_tol}
    return FactorizationResult(alpha, beta, us, r_factor, r_cons, r_row, r_col, r_y, r_z,
                               rank_tol, prov, e, f)


def symmetrize(x: OpSequence, decomposition: DecompositionResult) -> DecompositionResult:
    """For self-adjoint ``x_i``, replace ``(y, z)`` by ``((y + z^*)/2, (z + y^*)/2)``.

    The new pair still sums to ``x``, its objective is no larger, and
    ``z = y^*`` entrywise, so the extracted ``beta`` equals ``alpha``.
    """
    if not all(matcore.is_hermitian(xi) for xi in x.items if np.any(xi)):
        raise ValueError("symmetrize needs a self-adjoint sequence")
    y, z = decomposition.y, decomposition.z
    ys = 0.5 * (y.items + matcore.dagger(z.items))
    zs = matcore.dagger(ys)
    # x_i self-adjoint up to tolerance; absorb the antihermitian round-off into z
    zs = zs + (x.items - ys - zs)
    ny, nz = OpSequence(ys), OpSequence(zs)
    primal = objective(ny, nz)
    gap = max(primal - decomposition.dual_bound, 0.0)
    return DecompositionResult(ny, nz, primal, decomposition.dual_bound, gap,
                               decomposition.iterations, decomposition.u, decomposition.converged,
                               decomposition.stop_reason, decomposition.tol, decomposition.max_iter)


def factorize(x: OpSequence, selfadjoint: bool = False, rank_tol: float = SUPPORT_RANK_TOL,
              **solve_kw) -> FactorizationResult:
    """Solve for an optimal decomposition and extract the factorisation."""
    dec = m1_solve(x, **solve_kw)
    if selfadjoint:
        dec = symmetrize(x, dec)
    return extract_factorization(x, dec, rank_tol)


def kt_alpha_equivalence(x: OpSequence, fac: FactorizationResult, p: float, t_grid,
                         model: GModel = GModel("haar", 64)) -> dict:
    """Ratios ``[K_t(alpha) + K_t(beta)] / K_t(Gx)`` for ``K = K(.; L_p, L_inf)``.

    The comparison is proved under an L_inf Khintchine hypothesis that holds
    for free Haar unitaries, so the Haar surrogate is the intended model;
    Rademacher runs are flagged ``in_hypothesis = False``.
    """
    inf = float("inf")
    pa, pb = profile_of(fac.alpha), profile_of(fac.beta)
    g = g_profile(x, model)
    t_grid = np.asarray(t_grid, dtype=float)
    ratios = []
    for t in t_grid:
        num = k_proxy(pa, p, inf, t) + k_proxy(pb, p, inf, t)
        den = k_proxy(g, p, inf, t)
        ratios.append(num / den if den > 0 else (1.0 if num == 0 else inf))
    ratios = np.asarray(ratios)
    return {"t": t_grid, "ratios": ratios, "min": float(ratios.min()), "max": float(ratios.max()),
            "model": model.label, "surrogate": model.surrogate,
            "in_hypothesis": model.surrogate, "p": p}


def commutator_k_ratio(alpha, beta, b, theta: float, p: float, q: float, t_grid) -> dict:
    """Report ``K_{t^theta}(alpha^theta b + b beta^theta; p/theta, q/theta)``
    over ``K_t(alpha b + b beta; p, q)^theta ||b||_inf^(1 - theta)``.

    Report only: the comparison holds up to a constant the source leaves
    implicit, so nothing here is asserted.
    """
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    b = matcore.as_matrix(b)
    bn = matcore.opnorm(b)
    if bn == 0.0:
        raise ValueError("b must be nonzero")
    at = matcore.psd_fn(alpha, lambda lam: lam ** theta)
    bt = matcore.psd_fn(beta, lambda lam: lam ** theta)
    num_prof = profile_of(at @ b + b @ bt)
    den_prof = profile_of(matcore.as_matrix(alpha) @ b + b @ matcore.as_matrix(beta))
    qt = q / theta if q != float("inf") else q
    t_grid = np.asarray(t_grid, dtype=float)
    ratios = []
    for t in t_grid:
        num = k_proxy(num_prof, p / theta, qt, t ** theta)
        den = k_proxy(den_prof, p, q, t) ** theta * bn ** (1.0 - theta)
        ratios.append(num / den if den > 0 else float("inf"))
    ratios = np.asarray(ratios)
    return {"t": t_grid, "ratios": ratios, "min": float(ratios.min()),
            "max": float(ratios.max()), "theta": theta, "p": p, "q": q}
