"""Dense complex linear algebra on top of the Jacobi kernels.

Matrices are plain ``complex128`` numpy arrays. Everything here is a pure
function of its inputs (plus an explicit seed for :func:`haar_unitary`).
"""

from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .errors import NoConvergence, NotHermitian, NotPSD

EIG_TOL = 1e-14
HERM_TOL = 1e-10
PSD_TOL = 1e-10
RANK_TOL = 1e-10
MAX_SWEEPS = 80


class HermEig(NamedTuple):
    eigenvalues: np.ndarray
    basis: np.ndarray


class Svd(NamedTuple):
    left: np.ndarray
    singulars: np.ndarray
    right: np.ndarray


class PolarParts(NamedTuple):
    isometry: np.ndarray
    modulus: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-D ``complex128`` array (always a fresh copy)."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def opnorm(a) -> float:
    """Largest singular value."""
    s = svd(a).singulars
    return float(s[0]) if s.size else 0.0


def is_hermitian(a, tol=HERM_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = np.linalg.norm(a)
    return np.linalg.norm(a - dagger(a)) <= tol * scale


def herm_eig(a, tol=EIG_TOL, herm_tol=HERM_TOL, max_sweeps=MAX_SWEEPS) -> HermEig:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi.

    Eigenvalues come back nonincreasing; ties keep the order in which the
    sweeps left them on the diagonal, so the output is deterministic.

    Raises
    ------
    NotHermitian
        if ``||a - a*||_F > herm_tol * ||a||_F``.
    NoConvergence
        if the sweep limit is hit.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NotHermitian(f"matrix is not square: {a.shape}")
    if not is_hermitian(a, herm_tol):
        raise NotHermitian("matrix fails the Hermitian symmetry check")
    a = 0.5 * (a + dagger(a))
    w, v, sweeps = kernels.herm_jacobi(np.ascontiguousarray(a), tol, max_sweeps)
    if sweeps < 0:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    order = np.argsort(-w, kind="stable")
    return HermEig(w[order], np.ascontiguousarray(v[:, order]))


def _complete(cols, rank_mask):
    # Replace columns below the rank cutoff by an orthonormal completion:
    # the trailing columns of a full QR of [kept | I] span the complement.
    m, k = cols.shape
    out = cols.copy()
    kept = out[:, rank_mask]
    r = kept.shape[1]
    q, _ = np.linalg.qr(np.hstack([kept, np.eye(m, dtype=np.complex128)]), mode="complete")
    comp = q[:, r:]
    # re-orthogonalise against the kept vectors once more for safety
    comp = comp - kept @ (kept.conj().T @ comp)
    comp, _ = np.linalg.qr(comp)
    out[:, ~rank_mask] = comp[:, : k - r]
    return out


def svd(a, rank_tol=RANK_TOL, tol=None, max_sweeps=MAX_SWEEPS) -> Svd:
    """Thin SVD by one-sided Jacobi.

    ``left`` is ``m x k`` and ``right`` is ``n x k`` with ``k = min(m, n)``.
    Left singular vectors for singular values at or below
    ``rank_tol * s_1`` are filled in by Gram-Schmidt.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m < n:
        t = svd(dagger(a), rank_tol=rank_tol, tol=tol, max_sweeps=max_sweeps)
        return Svd(t.right, t.singulars, t.left)
    if tol is None:
        tol = max(m, 4) * np.finfo(float).eps
    W, Vt, sweeps = kernels.onesided_jacobi(np.ascontiguousarray(a.T), tol, max_sweeps)
    if sweeps < 0:
        raise NoConvergence(f"one-sided Jacobi did not converge in {max_sweeps} sweeps")
    sig = np.sqrt(np.sum(W.real ** 2 + W.imag ** 2, axis=1))
    order = np.argsort(-sig, kind="stable")
    sig = sig[order]
    W = W[order]
    Vt = Vt[order]
    cutoff = rank_tol * sig[0] if sig.size else 0.0
    keep = (sig > cutoff) & (sig > 0)
    left = np.zeros((m, n), dtype=np.complex128)
    left[:, keep] = W[keep].T / sig[keep]
    left[:, ~keep] = W[~keep].T
    if not np.all(keep):
        left = _complete(left, keep)
    return Svd(left, sig, np.ascontiguousarray(Vt.T))


def singular_values(a) -> np.ndarray:
    return svd(a).singulars


def psd_fn(a, f: Callable[[np.ndarray], np.ndarray], psd_tol=PSD_TOL) -> np.ndarray:
    """Apply ``f`` to a PSD matrix through its eigendecomposition.

    Eigenvalues in ``[-psd_tol * ||a||, 0)`` are clamped to zero before ``f``
    sees them; anything more negative raises :class:`NotPSD`.
    """
    eig = herm_eig(a)
    lam = eig.eigenvalues
    scale = np.max(np.abs(lam)) if lam.size else 0.0
    if lam.size and lam[-1] < -psd_tol * scale:
        raise NotPSD(f"smallest eigenvalue {lam[-1]:.3e} below -psd_tol*scale")
    lam = np.clip(lam, 0.0, None)
    v = eig.basis
    out = (v * np.asarray(f(lam), dtype=float)) @ dagger(v)
    return 0.5 * (out + dagger(out))


def herm_fn(a, f) -> np.ndarray:
    """Functional calculus for Hermitian (not necessarily PSD) matrices."""
    eig = herm_eig(a)
    v = eig.basis
    out = (v * np.asarray(f(eig.eigenvalues), dtype=float)) @ dagger(v)
    return 0.5 * (out + dagger(out))


def sqrtm_psd(a) -> np.ndarray:
    return psd_fn(a, np.sqrt)


def pseudo_sqrt_inv(a, rank_tol=RANK_TOL) -> np.ndarray:
    """Moore-Penrose inverse square root of a PSD matrix.

    Eigenvalues at or below ``rank_tol * lambda_max`` are sent to zero.
    """
    eig = herm_eig(a)
    lam = eig.eigenvalues
    top = lam[0] if lam.size else 0.0
    keep = lam > rank_tol * top
    inv = np.zeros_like(lam)
    inv[keep] = 1.0 / np.sqrt(lam[keep])
    v = eig.basis
    out = (v * inv) @ dagger(v)
    return 0.5 * (out + dagger(out))


def pinv_psd(a, rank_tol=RANK_TOL) -> np.ndarray:
    eig = herm_eig(a)
    lam = eig.eigenvalues
    top = lam[0] if lam.size else 0.0
    keep = lam > rank_tol * top
    inv = np.zeros_like(lam)
    inv[keep] = 1.0 / lam[keep]
    v = eig.basis
    out = (v * inv) @ dagger(v)
    return 0.5 * (out + dagger(out))


def support_projection(a, rank_tol=RANK_TOL) -> np.ndarray:
    """Projection onto the range of a PSD matrix."""
    eig = herm_eig(a)
    lam = eig.eigenvalues
    top = lam[0] if lam.size else 0.0
    v = eig.basis[:, lam > rank_tol * top] if top > 0 else eig.basis[:, :0]
    p = v @ dagger(v)
    return 0.5 * (p + dagger(p))


def polar(a, rank_tol=RANK_TOL) -> PolarParts:
    """Polar decomposition ``a = isometry @ modulus``.

    The isometry is the partial isometry ``U_r V_r^*`` on the numerical
    support, so ``isometry^* isometry`` is the support projection of the
    modulus.
    """
    a = as_matrix(a)
    s = svd(a, rank_tol=rank_tol)
    sig = s.singulars
    cut = rank_tol * sig[0] if sig.size else 0.0
    r = (sig > cut) & (sig > 0)
    iso = s.left[:, r] @ dagger(s.right[:, r])
    mod = (s.right * sig) @ dagger(s.right)
    return PolarParts(iso, 0.5 * (mod + dagger(mod)))


def spectral_projection(a, threshold: float, side: str = "above") -> np.ndarray:
    """Projection onto eigenvectors with eigenvalue ``>= threshold`` (``side="above"``)
    or ``< threshold`` (``side="below"``)."""
    if side not in ("above", "below"):
        raise ValueError(f"side must be 'above' or 'below', got {side!r}")
    eig = herm_eig(a)
    sel = eig.eigenvalues >= threshold
    if side == "below":
        sel = ~sel
    v = eig.basis[:, sel]
    p = v @ dagger(v)
    return 0.5 * (p + dagger(p))


def haar_unitary(dim: int, seed) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The diagonal of ``R`` is rotated onto the positive reals so the law is
    exactly Haar. ``seed`` is anything :func:`numpy.random.default_rng` takes.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    ph = d / np.abs(d)
    return q * ph

