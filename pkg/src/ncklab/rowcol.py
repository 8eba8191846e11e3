"""Row, column and Khintchine-average operators on finite sequences.

For ``x = (x_1, ..., x_N)`` of ``d x d`` matrices:

* ``Rx`` is the ``d x Nd`` row ``[x_1 ... x_N]``, ``|(Rx)^*|^2 = sum x_i x_i^*``;
* ``Cx`` is the ``Nd x d`` column, ``|Cx|^2 = sum x_i^* x_i``;
* ``Gx = sum x_i (x) xi_i`` for a family ``xi`` of unitaries on a probability
  space, either Rademacher signs (exact, by enumeration) or independent Haar
  unitaries of size ``D`` standing in for free Haar unitaries.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import kernels, matcore
from .errors import CapExceeded, NoConvergence, NotCommuting
from .profile import Profile, lp_norm, merge, profile_of

RADEMACHER_CAP = 16
COMMUTE_TOL = 1e-8


@dataclass(frozen=True)
class OpSequence:
    """Finite sequence of square matrices of a common size, stored ``(N, d, d)``."""

    items: np.ndarray

    def __init__(self, items):
        arr = np.array(items, dtype=np.complex128)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1, 1)
        if arr.ndim != 3 or arr.shape[0] < 1 or arr.shape[1] != arr.shape[2] or arr.shape[1] < 1:
            raise ValueError(f"expected N >= 1 square items, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sequence has non-finite entries")
        arr.flags.writeable = False
        object.__setattr__(self, "items", arr)

    @property
    def N(self) -> int:
        return self.items.shape[0]

    @property
    def dim(self) -> int:
        return self.items.shape[1]

    def __len__(self):
        return self.N

    def __getitem__(self, i):
        return self.items[i]

    def __iter__(self):
        return iter(self.items)

    def __eq__(self, other):
        return isinstance(other, OpSequence) and np.array_equal(self.items, other.items)

    def __hash__(self):
        return hash(self.items.tobytes())

    def adjoint(self) -> "OpSequence":
        """Entrywise adjoint ``(x_i^*)``."""
        return OpSequence(matcore.dagger(self.items))

    def __add__(self, other):
        return OpSequence(self.items + other.items)

    def __sub__(self, other):
        return OpSequence(self.items - other.items)

    def __mul__(self, c):
        return OpSequence(c * self.items)

    __rmul__ = __mul__

    def left(self, a) -> "OpSequence":
        """``(a x_i)``."""
        return OpSequence(np.asarray(a) @ self.items)

    def right(self, b) -> "OpSequence":
        """``(x_i b)``."""
        return OpSequence(self.items @ np.asarray(b))

    def scale(self) -> float:
        """``max_i ||x_i||_F``; a size reference for tolerances."""
        return float(np.max(np.linalg.norm(self.items, axis=(1, 2))))


def row_stack(x: OpSequence) -> np.ndarray:
    return np.concatenate(list(x.items), axis=1)


def col_stack(x: OpSequence) -> np.ndarray:
    return np.concatenate(list(x.items), axis=0)


def row_gram(x: OpSequence) -> np.ndarray:
    """``sum x_i x_i^* = |(Rx)^*|^2``."""
    g = np.einsum("nij,nkj->ik", x.items, np.conj(x.items))
    return 0.5 * (g + matcore.dagger(g))


def col_gram(x: OpSequence) -> np.ndarray:
    """``sum x_i^* x_i = |Cx|^2``."""
    g = np.einsum("nji,njk->ik", np.conj(x.items), x.items)
    return 0.5 * (g + matcore.dagger(g))


def row_modulus(x: OpSequence) -> np.ndarray:
    """``|(Rx)^*| = (sum x_i x_i^*)^(1/2)``."""
    return matcore.sqrtm_psd(row_gram(x))


def col_modulus(x: OpSequence) -> np.ndarray:
    """``|Cx| = (sum x_i^* x_i)^(1/2)``."""
    return matcore.sqrtm_psd(col_gram(x))


def r_profile(x: OpSequence) -> Profile:
    """``mu(Rx)``: ``d`` steps of unit width (standard trace)."""
    return profile_of(row_stack(x), 1.0)


def c_profile(x: OpSequence) -> Profile:
    return profile_of(col_stack(x), 1.0)


@dataclass(frozen=True)
class GModel:
    """The variable family ``xi``: ``"rademacher"`` or ``"haar"`` of size ``D``."""

    kind: str = "rademacher"
    D: int = 0
    seed: int = 0
    cap: int = RADEMACHER_CAP

    def __post_init__(self):
        if self.kind not in ("rademacher", "haar"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "haar" and self.D < 1:
            raise ValueError("haar model needs D >= 1")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "GModel":
        """``"rademacher"`` or ``"haar:D"``."""
        text = text.strip().lower()
        if text == "rademacher":
            return cls("rademacher")
        if text.startswith("haar:"):
            try:
                D = int(text[5:])
            except ValueError:
                raise ValueError(f"bad haar size in {text!r}") from None
            return cls("haar", D, seed)
        raise ValueError(f"unknown model {text!r}; expected 'rademacher' or 'haar:D'")

    @property
    def label(self) -> str:
        return "rademacher" if self.kind == "rademacher" else f"haar_surrogate:{self.D}"

    @property
    def surrogate(self) -> bool:
        return self.kind == "haar"


def sign_patterns(N: int) -> np.ndarray:
    return np.array(list(product((1.0, -1.0), repeat=N)))


def rademacher_blocks(x: OpSequence, cap: int = RADEMACHER_CAP) -> np.ndarray:
    """All ``2^N`` sums ``S_eps = sum eps_i x_i``, stacked ``(2^N, d, d)``."""
    if x.N > cap:
        raise CapExceeded(f"Rademacher enumeration needs N <= {cap}, got N = {x.N}")
    eps = sign_patterns(x.N)
    return np.einsum("pn,nij->pij", eps, x.items)


def haar_sum(x: OpSequence, D: int, seed=0) -> np.ndarray:
    """``sum x_i (x) U_i`` with independent ``D x D`` Haar unitaries seeded ``(seed, i)``."""
    out = np.zeros((x.dim * D, x.dim * D), dtype=np.complex128)
    for i, xi in enumerate(x.items):
        out += np.kron(xi, matcore.haar_unitary(D, (seed, i)))
    return out


def g_profile(x: OpSequence, model: GModel = GModel()) -> Profile:
    """``mu(Gx)`` under the trace ``Tr (x) tau``.

    Rademacher: exact merge of the ``2^N`` blocks, each of width ``2^-N``.
    Haar: the profile of one ``dD x dD`` sample with widths ``1/D``.
    """
    if model.kind == "rademacher":
        blocks = rademacher_blocks(x, model.cap)
        vals, sweeps = kernels.batch_singular_values(
            np.ascontiguousarray(blocks), max(x.dim, 4) * np.finfo(float).eps, matcore.MAX_SWEEPS
        )
        if sweeps < 0:
            raise NoConvergence("batched Jacobi did not converge")
        return Profile.from_arrays(vals.ravel(), 2.0 ** -x.N)
    return profile_of(haar_sum(x, model.D, model.seed), 1.0 / model.D)


def g_profile_slow(x: OpSequence, cap: int = RADEMACHER_CAP) -> Profile:
    """Reference implementation of the Rademacher profile, one SVD per block."""
    blocks = rademacher_blocks(x, cap)
    w = 2.0 ** -x.N
    return merge(profile_of(b, w) for b in blocks)


def lemma_trick_check(x: OpSequence, e, p: float, f=None, tol=COMMUTE_TOL) -> dict:
    """Check the splitting of row norms along a projection commuting with ``|(Rx)^*|``.

    With ``e`` commuting with ``|(Rx)^*|``, ``e |(Rx)^*|^p = |(R(ex))^*|^p``, so
    ``||Rx||_p^p = ||R(ex)||_p^p + ||R(e' x)||_p^p`` where ``e' = 1 - e``.
    Left multiplication by any projection ``f`` contracts ``||Cx||_p``.
    Returns the deviations; raises :class:`NotCommuting` when ``e`` does not
    commute with ``|(Rx)^*|``.
    """
    e = matcore.as_matrix(e)
    d = x.dim
    mod = row_modulus(x)
    scale = max(np.linalg.norm(mod), 1.0)
    comm = np.linalg.norm(e @ mod - mod @ e)
    if comm > tol * scale:
        raise NotCommuting(f"[e, |(Rx)*|] has norm {comm:.3e}")
    # singular values at round-off level are zeros; for p < 1 their p-th powers are not small
    floor = 16 * d * np.finfo(float).eps * lp_norm(r_profile(x), float("inf"))

    def rp(seq):
        f = r_profile(seq)
        return lp_norm(Profile.from_arrays(np.where(f.values > floor, f.values, 0.0), f.widths),
                       p) ** p

    total = rp(x)
    ep = np.eye(d) - e
    split = rp(x.left(e)) + rp(x.left(ep))
    split_dev = abs(total - split) / max(total, 1e-300)
    if f is None:
        f = e
    f = matcore.as_matrix(f)
    c_full = lp_norm(c_profile(x), p)
    c_cut = lp_norm(c_profile(x.left(f)), p)
    c_excess = max(0.0, c_cut - c_full) / max(c_full, 1e-300)
    return {
        "commutator": float(comm),
        "split_deviation": float(split_dev),
        "col_excess": float(c_excess),
        "deviation": float(max(split_dev, c_excess)),
    }
