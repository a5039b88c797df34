"""Kernel backend selection.

The hot loops (truncated convolutions of Witt-coefficient series) exist
twice: a compiled Cython extension (`_fastkern`) and a numpy reference
implementation (`reference`).  The compiled module is preferred when it
imported cleanly; set K2ALPHA_BACKEND=reference or =fast to force a choice.
Both expose the same three functions and are kept output-identical (see
tests/test_kernels.py and benchmarks/bench_kernels.py).
"""

from __future__ import annotations

import os

from . import reference

try:
    from . import _fastkern
except ImportError:  # pure install, or extension build skipped
    _fastkern = None

_BACKENDS = {"reference": reference}
if _fastkern is not None:
    _BACKENDS["fast"] = _fastkern


def _pick():
    want = os.environ.get("K2ALPHA_BACKEND", "").strip().lower()
    if want:
        if want not in _BACKENDS:
            raise ImportError(
                f"K2ALPHA_BACKEND={want!r} unavailable; have {sorted(_BACKENDS)}"
            )
        return _BACKENDS[want]
    return _BACKENDS.get("fast", reference)


_ACTIVE = _pick()


def backend_name() -> str:
    return _ACTIVE.name


def available_backends() -> dict:
    return dict(_BACKENDS)


def set_backend(name: str) -> None:
    """Swap the active backend (used by the benchmark and equivalence tests)."""
    global _ACTIVE
    _ACTIVE = _BACKENDS[name]


def conv_mul(x, y, mod):
    return _ACTIVE.conv_mul(x, y, mod)


def rowwise_conv(A, g, mod):
    return _ACTIVE.rowwise_conv(A, g, mod)


def pair_conv_acc(A, B, table, n_out, mod):
    return _ACTIVE.pair_conv_acc(A, B, table, n_out, mod)
