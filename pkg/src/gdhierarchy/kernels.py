"""Select the compiled kernel module if it was built, else the Python one.

Set ``GDH_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("GDH_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels_c as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

mul_buckets = _impl.mul_buckets
diff_slot = _impl.diff_slot
axpy = _impl.axpy
BACKEND = "cython" if _impl.__name__.endswith("_kernels_c") else "python"
