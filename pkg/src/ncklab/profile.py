"""Singular-number profiles, L_p and weak-L_p quasi-norms, K-functionals.

A :class:`Profile` is the nonincreasing step function ``mu(x)`` of an
operator. Widths carry the trace normalisation of the ambient algebra, so a
``d x d`` block under the trace ``2^-N * Tr`` contributes ``d`` steps of
width ``2^-N``.
"""

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import matcore

INF = float("inf")


class Profile:
    """Nonincreasing step function given by ``(value, width)`` pairs.

    Steps are sorted by value (then width) on construction and zero-width steps are
    dropped. Zero-value steps are kept: they carry the part of the ambient
    measure where ``mu`` vanishes, which matters for total width. Equality
    compares canonical forms (zero values removed, equal values merged).
    """

    __slots__ = ("values", "widths")

    def __init__(self, steps: Iterable[Sequence[float]] = ()):
        arr = np.asarray(list(steps), dtype=float).reshape(-1, 2)
        vals, wids = arr[:, 0], arr[:, 1]
        if np.any(~np.isfinite(arr)):
            raise ValueError("profile steps must be finite")
        if np.any(vals < 0) or np.any(wids < 0):
            raise ValueError("profile values and widths must be nonnegative")
        keep = wids > 0
        vals, wids = vals[keep], wids[keep]
        # ties broken by width so that any permutation of the same steps gives
        # identical arrays (and bit-identical norms)
        order = np.lexsort((-wids, -vals))
        self.values = vals[order]
        self.widths = wids[order]
        self.values.flags.writeable = False
        self.widths.flags.writeable = False

    @classmethod
    def from_arrays(cls, values, widths) -> "Profile":
        values = np.asarray(values, dtype=float).ravel()
        widths = np.broadcast_to(np.asarray(widths, dtype=float), values.shape)
        return cls(np.column_stack([values, widths]))

    @property
    def steps(self) -> list:
        return [(float(v), float(w)) for v, w in zip(self.values, self.widths)]

    @property
    def total_width(self) -> float:
        return float(self.widths.sum())

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f"Profile({self.steps!r})"

    def canonical(self) -> "Profile":
        """Drop zero values and merge runs of equal values."""
        nz = self.values > 0
        v, w = self.values[nz], self.widths[nz]
        if v.size == 0:
            return Profile()
        starts = np.flatnonzero(np.r_[True, v[1:] != v[:-1]])
        return Profile.from_arrays(v[starts], np.add.reduceat(w, starts))

    def __eq__(self, other):
        if not isinstance(other, Profile):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        return np.array_equal(a.values, b.values) and np.array_equal(a.widths, b.widths)

    def allclose(self, other: "Profile", rtol=1e-10, atol=1e-12) -> bool:
        """Compare as functions of t, sampling at every breakpoint of either."""
        # mu vanishes past the total width, so comparing the functions suffices
        a, b = self.canonical(), other.canonical()
        if not (len(a) or len(b)):
            return True
        ends = np.union1d(np.cumsum(a.widths), np.cumsum(b.widths))
        # breakpoints that differ only by rounding would put a sample on the wrong step
        sep = rtol * max(a.total_width, b.total_width) + atol
        ends = ends[np.r_[True, np.diff(ends) > sep]]
        mids = 0.5 * (np.r_[0.0, ends[:-1]] + ends)
        return np.allclose(a(mids), b(mids), rtol=rtol, atol=atol)

    def __call__(self, t):
        """Evaluate ``mu_t`` (right-open steps, 0 beyond the total width)."""
        t = np.asarray(t, dtype=float)
        ends = np.cumsum(self.widths)
        idx = np.searchsorted(ends, t, side="right")
        padded = np.r_[self.values, 0.0]
        return padded[idx]

    def power(self, s: float) -> "Profile":
        """The profile of ``|x|^s``: every value ``v`` becomes ``v**s``."""
        return Profile.from_arrays(self.values ** s, self.widths)

    def scale(self, c: float) -> "Profile":
        return Profile.from_arrays(abs(c) * self.values, self.widths)


def profile_of(a, weight: float = 1.0) -> Profile:
    """Profile of a single matrix: one step of width ``weight`` per singular value.

    For a square ``a`` the total width is ``cols * weight``; a rectangular
    ``m x n`` matrix contributes ``min(m, n)`` steps.
    """
    if weight <= 0:
        raise ValueError("weight must be positive")
    s = matcore.singular_values(a)
    return Profile.from_arrays(s, weight)


def merge(ps: Iterable[Profile]) -> Profile:
    """Profile of a direct sum (disjoint union of the underlying measure spaces)."""
    ps = list(ps)
    if not ps:
        return Profile()
    v = np.concatenate([p.values for p in ps])
    w = np.concatenate([p.widths for p in ps])
    return Profile.from_arrays(v, w)


def lp_norm(f: Profile, p: float) -> float:
    if p == INF:
        return float(f.values[0]) if len(f) else 0.0
    if p <= 0:
        raise ValueError("p must be positive")
    top = f.values[0] if len(f) else 0.0
    if top == 0.0:
        return 0.0
    # scale out the top value so that v**p neither underflows nor overflows
    return float(top * np.sum((f.values / top) ** p * f.widths) ** (1.0 / p))


def weak_lp(f: Profile, p: float) -> float:
    """``sup_t t^(1/p) mu_t``, attained at right endpoints of the steps."""
    if p <= 0:
        raise ValueError("p must be positive")
    if not len(f):
        return 0.0
    ends = np.cumsum(f.widths)
    return float(np.max(ends ** (1.0 / p) * f.values))


def integral_power(f: Profile, p: float, T: float) -> float:
    """``int_0^T mu^p`` computed exactly, including the final partial step."""
    if T <= 0 or not len(f):
        return 0.0
    starts = np.r_[0.0, np.cumsum(f.widths)[:-1]]
    covered = np.clip(T - starts, 0.0, f.widths)
    return float(np.sum(f.values ** p * covered))


def k_exact_1_inf(f: Profile, t: float) -> float:
    """Exact ``K_t(x; L_1, L_inf) = int_0^t mu``."""
    return integral_power(f, 1.0, t)


def k_proxy(f: Profile, p: float, q: float, t: float) -> float:
    """Holmstedt-type expression for ``K_t(x; L_p, L_q)``, ``0 < p < q <= inf``.

    With ``1/r = 1/p - 1/q`` it returns
    ``(int_0^{t^r} mu^p)^(1/p) + t (int_{t^r}^inf mu^q)^(1/q)``, which for
    ``q = inf`` is ``(int_0^{t^p} mu^p)^(1/p)``. Equivalent to the true K up to
    constants depending on ``p, q``; exact for ``(p, q) = (1, inf)``.
    Nondecreasing in ``t`` for ``q = inf`` only: with finite ``q`` the second
    term can overshoot (``f = 1`` on ``[0, 1]``, ``(p, q) = (1, 2)`` gives
    about 1.2 at ``t = 0.9`` and 1 at ``t = 1``).
    """
    if not (0 < p < q):
        raise ValueError(f"need 0 < p < q, got p={p}, q={q}")
    if t <= 0:
        return 0.0
    if q == INF:
        return integral_power(f, p, t ** p) ** (1.0 / p)
    r = 1.0 / (1.0 / p - 1.0 / q)
    T = t ** r
    head = integral_power(f, p, T) ** (1.0 / p)
    tail = max(lp_norm(f, q) ** q - integral_power(f, q, T), 0.0)
    return head + t * tail ** (1.0 / q)


def power_theorem_check(f: Profile, p: float, q: float, alpha: float, t_grid) -> np.ndarray:
    """Ratios ``K_t(f; p, q) / K_{t^(1/alpha)}(f^(1/alpha); p alpha, q alpha)^alpha``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    g = f.power(1.0 / alpha)
    out = []
    for t in np.asarray(t_grid, dtype=float):
        num = k_proxy(f, p, q, t)
        den = k_proxy(g, p * alpha, q * alpha, t ** (1.0 / alpha)) ** alpha
        if den == 0.0:
            out.append(1.0 if num == 0.0 else INF)
        else:
            out.append(num / den)
    return np.asarray(out)


def schatten_norm(a, p: float) -> float:
    s = matcore.singular_values(a)
    if p == INF:
        return float(s[0])
    return float(np.sum(s ** p) ** (1.0 / p))


def c_p_alpha(p: float, alpha: float) -> float:
    """The explicit power-theorem constant."""
    return max(1.0, 2.0 ** (1.0 / (p * alpha) - 1.0)) * max(2.0 ** (alpha - 1.0), 2.0 ** (1.0 - alpha))


@dataclass
class ConstantLedger:
    """Constants the checks are measured against.

    ``A`` holds the equivalence constants of the ``q = inf`` K-formula
    (``A_1 = 1`` exactly; other ``p`` fall back to ``A_default``, an empirical
    envelope). ``B`` holds assumed lower-Khintchine constants for the
    variable model and is empty unless the caller supplies values.
    """

    A: dict = field(default_factory=lambda: {1.0: 1.0})
    A_default: float = 4.0
    B: dict = field(default_factory=dict)
    c_inf: float | None = None
    holmstedt_slack: float = 1.0

    def A_p(self, p: float) -> float:
        return self.A.get(float(p), self.A_default)

    def c_p_alpha(self, p: float, alpha: float) -> float:
        return c_p_alpha(p, alpha)

    def C_p(self, p: float, B_p: float | None = None) -> float:
        """``max(A_p (A_p^p B_p^p + 1)^(1/p), 4 A_p)``; needs ``B_p``."""
        if B_p is None:
            if float(p) not in self.B:
                raise KeyError(f"no lower-Khintchine constant B_{p} in the ledger")
            B_p = self.B[float(p)]
        A = self.A_p(p)
        return max(A * (A ** p * B_p ** p + 1.0) ** (1.0 / p), 4.0 * A)
