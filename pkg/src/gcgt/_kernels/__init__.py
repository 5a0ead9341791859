"""Kernel selection: compiled extension when available, pure Python otherwise.

Set GCGT_PURE_PYTHON=1 to force the pure kernels (used by the benchmark
and by CI runs that exercise the fallback path).
"""

from __future__ import annotations

import os

from . import _slow

if os.environ.get("GCGT_PURE_PYTHON") == "1":
    _impl = _slow
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _slow

IMPLEMENTATION = _impl.IMPLEMENTATION

expansion_scan = _impl.expansion_scan
disjunct_witness = _impl.disjunct_witness
component_labels = _impl.component_labels
component_size_at_edge = _impl.component_size_at_edge
connected_trials = _impl.connected_trials
walk_edges = _impl.walk_edges


def available_implementations() -> dict[str, object]:
    """Importable kernel modules keyed by name (for tests and benchmarks)."""
    found: dict[str, object] = {"pure-python": _slow}
    try:
        from . import _fast

        found["cython"] = _fast
    except ImportError:
        pass
    return found
