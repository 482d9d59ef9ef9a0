"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the pure
numpy fallback implements identical semantics. Set ``JOINTEMB_PURE_PY=1``
to force the fallback (used by the benchmark and parity tests).
"""

import os

from . import _pure

if os.environ.get("JOINTEMB_PURE_PY"):
    _backend = _pure
else:
    try:
        from . import _fast as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _pure

BACKEND = _backend.NAME

rng_stream = _backend.rng_stream
sgns_epoch = _backend.sgns_epoch
sgns_pairs_epoch = _backend.sgns_pairs_epoch
subword_sgns_epoch = _backend.subword_sgns_epoch
glove_epoch = _backend.glove_epoch
lda_sweep = _backend.lda_sweep


def get_backend(name: str):
    """Return a specific backend module ("pure-python" or "cython").

    Raises ImportError if the compiled backend was requested but is not
    built. Used by the benchmark to time both implementations side by side.
    """
    if name == _pure.NAME:
        return _pure
    if name == "cython":
        from . import _fast
        return _fast
    raise ValueError(f"unknown kernel backend {name!r}")
