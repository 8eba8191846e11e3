"""Pure-numpy versions of the kernels in :mod:`ncklab._kernels_nb`.

Same algorithms and return conventions; each rotation is applied with
vectorised row/column updates instead of scalar loops.
"""

import numpy as np


def _rotation(app, aqq, apq):
    g = abs(apq)
    e = apq / g
    tau = (aqq - app) / (2.0 * g)
    if abs(tau) > 1e150:
        t = 0.5 / tau
    elif tau >= 0.0:
        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    return c, s * e, s * np.conj(e), t * g


def herm_jacobi(a, tol, max_sweeps):
    n = a.shape[0]
    A = np.array(a, dtype=np.complex128)
    Vt = np.eye(n, dtype=np.complex128)
    fro = np.linalg.norm(A)
    if fro == 0.0:
        return np.zeros(n), Vt.T, 0
    conv = tol * fro
    skip = conv / n
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = np.sqrt(2.0 * np.sum(np.abs(A[iu]) ** 2))
        if off <= conv:
            return A.diagonal().real.copy(), Vt.T, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= skip:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                c, se, sec, tg = _rotation(app, aqq, apq)
                rp = A[p].copy()
                rq = A[q].copy()
                A[p] = c * rp - se * rq
                A[q] = sec * rp + c * rq
                A[:, p] = np.conj(A[p])
                A[:, q] = np.conj(A[q])
                A[p, p] = app - tg
                A[q, q] = aqq + tg
                A[p, q] = 0.0
                A[q, p] = 0.0
                vp = Vt[p].copy()
                vq = Vt[q]
                Vt[p] = c * vp - sec * vq
                Vt[q] = se * vp + c * vq
    return A.diagonal().real.copy(), Vt.T, -1


def _onesided(W, Vt, tol, max_sweeps, want_v):
    n = W.shape[0]
    floor = np.finfo(float).eps ** 2 * np.sum(np.abs(W) ** 2)
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                wp = W[p]
                wq = W[q]
                alpha = np.vdot(wp, wp).real
                beta = np.vdot(wq, wq).real
                gamma = np.vdot(wp, wq)
                g = abs(gamma)
                if g == 0.0 or g <= tol * np.sqrt(alpha * beta) or min(alpha, beta) <= floor:
                    continue
                rotated = True
                c, se, sec, _ = _rotation(alpha, beta, gamma)
                wp = wp.copy()
                W[p] = c * wp - sec * wq
                W[q] = se * wp + c * wq
                if want_v:
                    vp = Vt[p].copy()
                    vq = Vt[q]
                    Vt[p] = c * vp - sec * vq
                    Vt[q] = se * vp + c * vq
        if not rotated:
            return sweep
    return -1


def onesided_jacobi(W, tol, max_sweeps):
    Wc = np.array(W, dtype=np.complex128)
    Vt = np.eye(Wc.shape[0], dtype=np.complex128)
    sweeps = _onesided(Wc, Vt, tol, max_sweeps, True)
    return Wc, Vt, sweeps


def batch_singular_values(stack, tol, max_sweeps):
    P, m, n = stack.shape
    out = np.empty((P, n))
    worst = 0
    for i in range(P):
        W = np.ascontiguousarray(stack[i].T)
        st = _onesided(W, None, tol, max_sweeps, False)
        out[i] = -np.sort(-np.linalg.norm(W, axis=1))
        if st < 0:
            worst = -1
        elif worst >= 0:
            worst = max(worst, st)
    return out, worst


def givens_chain(lam, targets, tol):
    n = lam.shape[0]
    M = np.diag(np.asarray(lam, dtype=float))
    for k in range(n - 1):
        d = targets[k]
        free = np.arange(k, n)
        diag = M.diagonal()[k:]
        up = free[diag >= d - tol]
        if up.size == 0:
            return M, k + 1
        hi = up[np.argmin(M.diagonal()[up])]
        down = free[(diag <= d + tol) & (free != hi)]
        if down.size == 0:
            return M, k + 1
        lo = down[np.argmax(M.diagonal()[down])]
        if hi != k:
            M[:, [k, hi]] = M[:, [hi, k]]
            M[[k, hi], :] = M[[hi, k], :]
            if lo == k:
                lo = hi
        li = M[k, k]
        lj = M[lo, lo]
        if li - lj <= tol:
            continue
        cc = min(max((d - lj) / (li - lj), 0.0), 1.0)
        c = np.sqrt(cc)
        s = np.sqrt(1.0 - cc)
        mk = M[:, k].copy()
        ml = M[:, lo].copy()
        M[:, k] = c * mk - s * ml
        M[:, lo] = s * mk + c * ml
        mk = M[k, :].copy()
        ml = M[lo, :].copy()
        M[k, :] = c * mk - s * ml
        M[lo, :] = s * mk + c * ml
    return M, 0
