"""Row-reduction kernel with a compiled core and a pure-Python fallback.

Exact integer echelonization is where essentially all of the engine's time
goes, so the inner loop exists twice: once as a Cython extension
(``_speedups``) and once in plain Python (``pure``).  Both implement the
identical algorithm and produce bit-identical results; the compiled one is
simply faster.  Selection happens here at import time and can be forced
through the ``TAUTRING_KERNEL`` environment variable (``pure`` or
``compiled``), which the benchmark and the backend-equality tests rely on.
"""

import os

from . import pure

_FORCED = os.environ.get("TAUTRING_KERNEL", "").strip().lower()

if _FORCED not in ("", "pure", "compiled"):
    raise ImportError(
        "TAUTRING_KERNEL must be 'pure' or 'compiled', got %r" % (_FORCED,)
    )

if _FORCED == "pure":
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        if _FORCED == "compiled":
            raise
        _impl = pure
        BACKEND = "pure"

SpanReducer = _impl.SpanReducer
degree_keys = _impl.degree_keys


def get_backend(name=None):
    """Return ``(SpanReducer, degree_keys)`` for an explicit backend name.

    ``None`` means whichever backend was selected at import time.  Asking for
    ``compiled`` when the extension is absent raises ImportError.
    """
    if name is None:
        return SpanReducer, degree_keys
    if name == "pure":
        return pure.SpanReducer, pure.degree_keys
    if name == "compiled":
        from . import _speedups

        return _speedups.SpanReducer, _speedups.degree_keys
    raise ValueError("unknown kernel backend: %r" % (name,))
