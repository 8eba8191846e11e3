"""Runtime switch between the numba kernels and the pure-numpy fallback.

Set ``NCK_JIT=0`` before import to run everything through
:mod:`ncklab._kernels_np` (useful under a debugger). ``NCK_THREADS`` caps the
numba thread pool used by the batched kernels.
"""

import os

_OFF = ("0", "false", "no", "off")

JIT_ENABLED = os.environ.get("NCK_JIT", "1").strip().lower() not in _OFF

if JIT_ENABLED:
    try:
        import numba
    except ImportError:  # pragma: no cover
        JIT_ENABLED = False

if JIT_ENABLED:
    from numba import njit, prange

    # The system TBB is too old for numba; skip it unless the user chose a layer.
    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

    _threads = os.environ.get("NCK_THREADS")
    if _threads:
        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
else:
    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f
        return wrapper

    prange = range


def thread_count():
    """Number of worker threads the batched kernels will use."""
    if JIT_ENABLED:
        import numba
        return numba.get_num_threads()
    return 1
