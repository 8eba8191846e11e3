"""ncklab: a desk-scale laboratory for noncommutative Khintchine inequalities.

Modules
-------
matcore     dense complex linear algebra on Jacobi kernels
profile     singular-number profiles, L_p / weak-L_p norms, K-functionals
rowcol      row, column and Khintchine-average operators
decomp      optimal row + column decompositions at p = 1
factor      the factorisation x = alpha u + u beta
schurhorn   Schur-Horn constructions and weak-L_2 counterexamples
ineq        witnesses for routine operator inequalities, power-theorem harness
cli         batch experiment runner
"""

__version__ = "0.1.0"

from .errors import (CapExceeded, DegenerateSupport, KernelMismatch, MajorizationViolated,
                     MalformedInput, MaxIterExceeded, NCKError, NoConvergence, NotCommuting,
                     NotHermitian, NotPSD, NumericalBreakdown)
from .kernels import BACKEND
from .profile import ConstantLedger, Profile
from .rowcol import GModel, OpSequence

__all__ = [
    "__version__", "BACKEND", "ConstantLedger", "GModel", "OpSequence", "Profile",
    "CapExceeded", "DegenerateSupport", "KernelMismatch", "MajorizationViolated",
    "MalformedInput", "MaxIterExceeded", "NCKError", "NoConvergence", "NotCommuting",
    "NotHermitian", "NotPSD", "NumericalBreakdown",
]
