"""Backend selection for the hot inner-integral kernels.

The same two entry points exist in a compiled Cython extension
(``_kernels``) and a pure-numpy fallback (``_kernels_py``); they are
independent implementations of one contract and are cross-checked in the
test suite.  Selection happens once, at import time, via the
``QCC_BACKEND`` environment variable:

* ``auto`` (default): compiled if available, else python;
* ``compiled``: require the extension, raise if missing;
* ``python``: force the fallback (useful for benchmarking and debugging).
"""

import os as _os

_choice = _os.environ.get("QCC_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "compiled", "python"):
    raise ImportError(
        f"QCC_BACKEND must be 'auto', 'compiled' or 'python', got {_choice!r}"
    )

if _choice == "python":
    from ._kernels_py import inner_commutator_profile, inner_field_profile
    backend_name = "python"
else:
    try:
        from ._kernels import inner_commutator_profile, inner_field_profile
        backend_name = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        from ._kernels_py import inner_commutator_profile, inner_field_profile
        backend_name = "python"

__all__ = ["inner_commutator_profile", "inner_field_profile", "backend_name"]
