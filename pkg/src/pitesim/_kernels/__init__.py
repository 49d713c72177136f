"""Kernel selection: compiled extension when available, numpy fallback otherwise."""

from __future__ import annotations

import numpy as np

from .compiled import CompiledCircuit, compile_circuit
from .fallback import run_shot_fallback

try:
    from . import statevec as _ext

    HAVE_EXTENSION = True
except ImportError:  # pragma: no cover - depends on build environment
    _ext = None
    HAVE_EXTENSION = False


def run_shot_compiled(
    cc: CompiledCircuit, seed: int, p2: float, spam: float, use_extension: bool | None = None
) -> np.ndarray:
    """One trajectory through a compiled circuit; returns the bit record."""
    use = HAVE_EXTENSION if use_extension is None else use_extension
    if use and not HAVE_EXTENSION:
        raise RuntimeError("compiled kernel requested but the extension is not built")
    if use:
        bits = np.zeros(cc.n_bits, dtype=np.int8)
        _ext.run_shot_kernel(
            cc.n_wires,
            cc.code,
            cc.wa,
            cc.wb,
            cc.xmask,
            cc.zmask,
            cc.angle,
            cc.bit,
            cc.value,
            cc.entangler,
            bits,
            seed,
            p2,
            spam,
        )
        return bits
    return run_shot_fallback(cc, seed, p2, spam)


__all__ = ["CompiledCircuit", "compile_circuit", "run_shot_compiled", "HAVE_EXTENSION"]
