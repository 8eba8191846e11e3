"""Schur-Horn constructions and the weak-L_2 counterexample families.

For a PSD ``M`` put ``x_i = e_ii M^(1/2)``. Cross terms ``x_i^* x_j`` vanish
for ``i != j``, so ``sum x_i^* x_i = M`` while ``sum x_i x_i^* = Diag(M)``.
Every Rademacher (or unitary) average then has ``|S|^2 = M``, hence
``mu(Gx) = mu(Cx) = sqrt(spec M)`` and ``mu(Rx) = sqrt(diag M)``. Choosing
the spectrum and the diagonal through Schur-Horn separates ``||Gx||_{2,inf}``
from ``||Rx||_{2,inf}`` in either direction.
"""

from dataclasses import dataclass
from math import fsum

import numpy as np

from . import kernels, matcore
from .errors import MajorizationViolated, NumericalBreakdown
from .profile import Profile, weak_lp
from .rowcol import OpSequence

VERIFY_CAP = 512
MAJ_TOL = 1e-10


@dataclass(frozen=True)
class MajorizationPair:
    """Target spectrum ``lam`` (nonincreasing) and target diagonal ``diag``.

    ``diag`` is zero-padded to the length of ``lam``.
    """

    lam: np.ndarray
    diag: np.ndarray

    def __init__(self, lam, diag):
        lam = np.asarray(lam, dtype=float).ravel()
        diag = np.asarray(diag, dtype=float).ravel()
        n = max(lam.size, diag.size)
        lam = np.r_[lam, np.zeros(n - lam.size)]
        diag = np.r_[diag, np.zeros(n - diag.size)]
        if np.any(lam < 0) or np.any(diag < 0):
            raise ValueError("spectrum and diagonal must be nonnegative")
        object.__setattr__(self, "lam", -np.sort(-lam))
        object.__setattr__(self, "diag", diag)

    @property
    def n(self) -> int:
        return self.lam.size

    def majorization_defect(self) -> float:
        """Largest violation of the partial-sum conditions, relative to ``lam_max``."""
        a = np.cumsum(self.lam)
        b = np.cumsum(-np.sort(-self.diag))
        scale = max(self.lam[0] if self.n else 0.0, 1e-300)
        defect = max(np.max(b - a), abs(a[-1] - b[-1])) if self.n else 0.0
        return float(max(defect, 0.0) / scale)

    def is_majorized(self, tol=MAJ_TOL) -> bool:
        return self.majorization_defect() <= tol


def chan_li(pair: MajorizationPair, tol: float = MAJ_TOL) -> np.ndarray:
    """Real symmetric ``M`` with spectrum ``pair.lam`` and diagonal ``pair.diag``.

    Targets are placed largest first. For each one the working diagonal
    supplies the tightest bracket ``lam_i >= d >= lam_j``, a Givens rotation
    with ``cos^2 = (d - lam_j) / (lam_i - lam_j)`` puts ``d`` on the diagonal,
    and the leftover ``lam_i + lam_j - d`` stays in the pool. The result is
    finally permuted to the requested diagonal order.
    """
    if not pair.is_majorized(tol):
        raise MajorizationViolated(f"diag is not majorized by lam "
                                   f"(defect {pair.majorization_defect():.3e})")
    n = pair.n
    if n == 0:
        return np.zeros((0, 0))
    scale = pair.lam[0]
    order = np.argsort(-pair.diag, kind="stable")
    targets = pair.diag[order]
    M, status = kernels.givens_chain(np.ascontiguousarray(pair.lam),
                                     np.ascontiguousarray(targets), tol * max(scale, 1e-300))
    if status != 0:
        raise NumericalBreakdown(f"no bracketing pair for target {status - 1}")
    M = 0.5 * (M + M.T)
    out = np.empty_like(M)
    out[np.ix_(order, order)] = M
    return out


def chan_li_errors(M, pair: MajorizationPair, verify_cap: int = VERIFY_CAP,
                   eigenvalues=None) -> dict:
    """Diagonal error always; spectrum error when ``n <= verify_cap``. Both relative to ``lam_max``."""
    scale = max(pair.lam[0], 1e-300) if pair.n else 1.0
    out = {
        "diag_error": float(np.max(np.abs(np.diag(M) - pair.diag)) / scale) if pair.n else 0.0,
        "trace_error": abs(float(np.trace(M)) - fsum(pair.lam)) / scale,
        "frobenius_error": abs(float(np.linalg.norm(M)) - float(np.linalg.norm(pair.lam))) / scale,
        "verified": False,
        "spectrum_error": None,
    }
    if pair.n <= verify_cap:
        ev = matcore.herm_eig(M).eigenvalues if eigenvalues is None else eigenvalues
        out["spectrum_error"] = float(np.max(np.abs(ev - pair.lam)) / scale)
        out["verified"] = True
    return out


def build_x(M) -> OpSequence:
    """``x_i = e_ii M^(1/2)`` for ``i = 1..n``."""
    root = matcore.sqrtm_psd(M)
    n = root.shape[0]
    items = np.zeros((n, n, n), dtype=np.complex128)
    for i in range(n):
        items[i, i, :] = root[i, :]
    return OpSequence(items)


@dataclass
class CounterexampleReport:
    N: int
    family: int
    g_weak2: float
    r_weak2: float
    c_weak2: float
    ratio: float
    verified: bool
    size: int = 0
    diag_error: float = 0.0
    spectrum_error: float | None = None

    def row(self) -> dict:
        return {"N": self.N, "family": self.family, "size": self.size, "g_weak2": self.g_weak2,
                "r_weak2": self.r_weak2, "c_weak2": self.c_weak2, "ratio": self.ratio,
                "verified": self.verified, "diag_error": self.diag_error,
                "spectrum_error": self.spectrum_error}


def _report(N, family, pair, verify_cap):
    M = chan_li(pair)
    # spectrum read off the constructed M when affordable, else the construction target
    ev = matcore.herm_eig(M).eigenvalues if pair.n <= verify_cap else None
    err = chan_li_errors(M, pair, verify_cap, ev)
    spec = np.clip(ev, 0.0, None) if ev is not None else pair.lam
    diag = np.clip(np.diag(M), 0.0, None)
    g = Profile.from_arrays(np.sqrt(spec), 1.0)
    r = Profile.from_arrays(np.sqrt(diag), 1.0)
    gw = weak_lp(g, 2.0)
    rw = weak_lp(r, 2.0)
    ratio = gw / rw if family == 1 else rw / gw
    return CounterexampleReport(N, family, gw, rw, gw, ratio, err["verified"], pair.n,
                                err["diag_error"], err["spectrum_error"])


def harmonic(N: int) -> float:
    return fsum(1.0 / i for i in range(1, N + 1))


def divisor_sum(N: int) -> int:
    """``v_N = sum_{i <= N} floor(N / i)``."""
    return sum(N // i for i in range(1, N + 1))


def family1_pair(N: int) -> MajorizationPair:
    if N < 1:
        raise ValueError("N must be >= 1")
    lam = np.zeros(N)
    lam[0] = harmonic(N)
    return MajorizationPair(lam, 1.0 / np.arange(1, N + 1))


def family2_pair(N: int) -> MajorizationPair:
    if N < 1:
        raise ValueError("N must be >= 1")
    a2 = np.array([N // i for i in range(1, N + 1)], dtype=float)
    return MajorizationPair(a2, np.ones(divisor_sum(N)))


def family1(N: int, verify_cap: int = VERIFY_CAP) -> CounterexampleReport:
    """Spectrum ``(H_N, 0, ..., 0)``, diagonal ``(1, 1/2, ..., 1/N)``.

    ``||Gx||_{2,inf} = sqrt(H_N)`` against ``||Rx||_{2,inf} = 1``.
    """
    return _report(N, 1, family1_pair(N), verify_cap)


def family2(N: int, verify_cap: int = VERIFY_CAP) -> CounterexampleReport:
    """Spectrum ``(floor(N/i))_{i <= N}`` zero-padded, diagonal ``1`` of length ``v_N``.

    ``||Gx||_{2,inf} = sqrt(N)`` against ``||Rx||_{2,inf} = sqrt(v_N)``.
    """
    return _report(N, 2, family2_pair(N), verify_cap)


def sweep(family: int, Ns, verify_cap: int = VERIFY_CAP) -> list:
    fn = {1: family1, 2: family2}[family]
    return [fn(int(N), verify_cap) for N in Ns]
