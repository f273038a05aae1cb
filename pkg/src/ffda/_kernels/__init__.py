"""Kernel backend selection.

The compiled extension is preferred when importable; ``FFDA_BACKEND=pure``
forces the fallback, ``FFDA_BACKEND=c`` insists on the extension.  Both
backends implement the same functions with bit-identical results.
"""

import os

_choice = os.environ.get("FFDA_BACKEND", "").strip().lower()

if _choice == "pure":
    from . import _pykern as impl
elif _choice == "c":
    from . import _ckern as impl  # type: ignore[no-redef]
else:
    try:
        from . import _ckern as impl  # type: ignore[no-redef]
    except ImportError:
        from . import _pykern as impl

BACKEND = impl.BACKEND

poly_trim = impl.poly_trim
poly_add = impl.poly_add
poly_neg = impl.poly_neg
poly_sub = impl.poly_sub
poly_mul = impl.poly_mul
poly_divmod = impl.poly_divmod
mat_nullspace = impl.mat_nullspace
weak_popov = impl.weak_popov
