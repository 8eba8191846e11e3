"""Kernel dispatch: numba when :data:`ncklab._jit.JIT_ENABLED`, numpy otherwise."""

from . import _kernels_np as numpy_backend
from ._jit import JIT_ENABLED

if JIT_ENABLED:
    from . import _kernels_nb as numba_backend
    _active = numba_backend
else:
    numba_backend = None
    _active = numpy_backend

BACKEND = "numba" if JIT_ENABLED else "numpy"

herm_jacobi = _active.herm_jacobi
onesided_jacobi = _active.onesided_jacobi
batch_singular_values = _active.batch_singular_values
givens_chain = _active.givens_chain
