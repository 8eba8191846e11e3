"""Numba kernels: cyclic Jacobi (two-sided and one-sided) and the Givens chain.

All kernels report failure through an integer status instead of raising, the
Python wrappers in :mod:`ncklab.matcore` and :mod:`ncklab.schurhorn` turn
those into exceptions.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True)
def _rotation(app, aqq, apq):
    # Unitary J = [[c, s*e], [-s*conj(e), c]] with J^* [[app, apq], [conj(apq), aqq]] J
    # diagonal; the last entry is the shift t*|apq| of the two diagonal values.
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


@njit(cache=True)
def herm_jacobi(a, tol, max_sweeps):
    """Cyclic Jacobi on a Hermitian matrix.

    Returns ``(eigenvalues, basis, sweeps)`` with eigenvalues unsorted and
    ``sweeps == -1`` when the off-diagonal mass did not drop below
    ``tol * ||a||_F`` within ``max_sweeps``.
    """
    n = a.shape[0]
    A = a.copy()
    Vt = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += A[i, j].real ** 2 + A[i, j].imag ** 2
    fro = np.sqrt(fro)
    w = np.empty(n)
    if fro == 0.0:
        for i in range(n):
            w[i] = 0.0
        return w, Vt.T, 0
    conv = tol * fro
    skip = conv / n
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += A[p, q].real ** 2 + A[p, q].imag ** 2
        if np.sqrt(2.0 * off) <= conv:
            for i in range(n):
                w[i] = A[i, i].real
            return w, Vt.T, sweep
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
                # rows p, q of J^* A; columns follow by Hermitian symmetry
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - se * aqk
                    A[q, k] = sec * apk + c * aqk
                for k in range(n):
                    A[k, p] = np.conj(A[p, k])
                    A[k, q] = np.conj(A[q, k])
                A[p, p] = app - tg
                A[q, q] = aqq + tg
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    vp = Vt[p, k]
                    vq = Vt[q, k]
                    Vt[p, k] = c * vp - sec * vq
                    Vt[q, k] = se * vp + c * vq
    for i in range(n):
        w[i] = A[i, i].real
    return w, Vt.T, -1


@njit(cache=True)
def _onesided(W, Vt, tol, max_sweeps, want_v):
    # Rows of W are the columns being orthogonalised; Vt rows accumulate V's columns.
    n, m = W.shape
    # columns below eps * ||W||_F are round-off; rotating them never converges
    fro2 = 0.0
    for p in range(n):
        for k in range(m):
            fro2 += W[p, k].real ** 2 + W[p, k].imag ** 2
    floor = (2.220446049250313e-16 ** 2) * fro2
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0 + 0.0j
                for k in range(m):
                    wp = W[p, k]
                    wq = W[q, k]
                    alpha += wp.real * wp.real + wp.imag * wp.imag
                    beta += wq.real * wq.real + wq.imag * wq.imag
                    gamma += np.conj(wp) * wq
                g = abs(gamma)
                if g == 0.0 or g <= tol * np.sqrt(alpha * beta) or min(alpha, beta) <= floor:
                    continue
                rotated = True
                c, se, sec, _ = _rotation(alpha, beta, gamma)
                for k in range(m):
                    wp = W[p, k]
                    wq = W[q, k]
                    W[p, k] = c * wp - sec * wq
                    W[q, k] = se * wp + c * wq
                if want_v:
                    for k in range(n):
                        vp = Vt[p, k]
                        vq = Vt[q, k]
                        Vt[p, k] = c * vp - sec * vq
                        Vt[q, k] = se * vp + c * vq
        if not rotated:
            return sweep
    return -1


@njit(cache=True)
def onesided_jacobi(W, tol, max_sweeps):
    """One-sided (Hestenes) Jacobi on the rows of ``W`` (an ``n x m`` array).

    Returns ``(W_rotated, Vt, sweeps)``; ``W_rotated`` has mutually orthogonal
    rows whose norms are the singular values of ``W.T``.
    """
    Wc = W.copy()
    n = Wc.shape[0]
    Vt = np.eye(n, dtype=np.complex128)
    sweeps = _onesided(Wc, Vt, tol, max_sweeps, True)
    return Wc, Vt, sweeps


@njit(cache=True, parallel=True)
def batch_singular_values(stack, tol, max_sweeps):
    """Singular values of every ``stack[i]`` (sorted nonincreasing).

    Returns ``(values, worst_sweeps)`` where ``worst_sweeps`` is -1 if any
    matrix failed to converge.
    """
    P, m, n = stack.shape
    out = np.empty((P, n))
    status = np.zeros(P, dtype=np.int64)
    for i in prange(P):
        W = np.empty((n, m), dtype=np.complex128)
        for r in range(m):
            for c in range(n):
                W[c, r] = stack[i, r, c]
        dummy = np.empty((1, 1), dtype=np.complex128)
        status[i] = _onesided(W, dummy, tol, max_sweeps, False)
        for c in range(n):
            acc = 0.0
            for r in range(m):
                acc += W[c, r].real ** 2 + W[c, r].imag ** 2
            out[i, c] = np.sqrt(acc)
        out[i] = -np.sort(-out[i])
    worst = 0
    for i in range(P):
        if status[i] < 0:
            worst = -1
            break
        if status[i] > worst:
            worst = status[i]
    return out, worst


@njit(cache=True)
def givens_chain(lam, targets, tol):
    """Real symmetric matrix with spectrum ``lam`` and diagonal ``targets``.

    Both inputs sorted nonincreasing. Status 0 on success, ``k + 1`` when no
    bracketing pair exists for target ``k``.
    """
    n = lam.shape[0]
    M = np.zeros((n, n))
    for i in range(n):
        M[i, i] = lam[i]
    for k in range(n - 1):
        d = targets[k]
        # tightest bracket among free positions k..n-1
        hi = -1
        lo = -1
        for j in range(k, n):
            v = M[j, j]
            if v >= d - tol and (hi < 0 or v < M[hi, hi]):
                hi = j
        if hi < 0:
            return M, k + 1
        for j in range(k, n):
            if j == hi:
                continue
            v = M[j, j]
            if v <= d + tol and (lo < 0 or v > M[lo, lo]):
                lo = j
        if lo < 0:
            return M, k + 1
        if hi != k:
            for r in range(n):
                tmp = M[r, k]
                M[r, k] = M[r, hi]
                M[r, hi] = tmp
            for r in range(n):
                tmp = M[k, r]
                M[k, r] = M[hi, r]
                M[hi, r] = tmp
            if lo == k:
                lo = hi
        li = M[k, k]
        lj = M[lo, lo]
        if li - lj <= tol:
            continue
        cc = (d - lj) / (li - lj)
        if cc < 0.0:
            cc = 0.0
        elif cc > 1.0:
            cc = 1.0
        c = np.sqrt(cc)
        s = np.sqrt(1.0 - cc)
        # M <- G^T M G with G e_k = c e_k - s e_lo, G e_lo = s e_k + c e_lo
        for r in range(n):
            mk = M[r, k]
            ml = M[r, lo]
            M[r, k] = c * mk - s * ml
            M[r, lo] = s * mk + c * ml
        for r in range(n):
            mk = M[k, r]
            ml = M[lo, r]
            M[k, r] = c * mk - s * ml
            M[lo, r] = s * mk + c * ml
    return M, 0
