"""Pure-numpy shot execution, RNG-compatible with the compiled kernel.

Both kernels draw from the same splitmix64 stream in the same order, so a
given (circuit, noise, seed) produces the same shot record on either path.
"""

from __future__ import annotations

import numpy as np

from .compiled import (
    OP_CPAULI,
    OP_CX,
    OP_H,
    OP_MEASURE,
    OP_PAULI,
    OP_RESET,
    OP_ROT,
    CompiledCircuit,
    pauli_error_masks,
)

_MASK64 = (1 << 64) - 1
_PHASE_I = np.array([1, 1j, -1, -1j])
_INV_2_53 = 1.0 / (1 << 53)


class SplitMix64:
    """Deterministic 64-bit stream; the shared shot RNG."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_double(self) -> float:
        return (self.next_u64() >> 11) * _INV_2_53


def _pauli_vectors(x: int, z: int, dim: int):
    idx = np.arange(dim, dtype=np.uint64)
    parity = (np.bitwise_count(idx & np.uint64(z)) & 1).astype(np.int64)
    phase = _PHASE_I[int(x & z).bit_count() % 4] * np.where(parity, -1.0, 1.0)
    perm = (idx ^ np.uint64(x)).astype(np.int64)
    return perm, phase


def _apply_pauli(state, x: int, z: int):
    if x == 0 and z == 0:
        return state
    perm, phase = _pauli_vectors(x, z, len(state))
    return phase[perm] * state[perm]


def _apply_rot(state, x: int, z: int, theta: float):
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return c * state - 1j * s * _apply_pauli(state, x, z)


def _apply_h(state, w: int):
    dim = len(state)
    idx = np.arange(dim)
    hi = (idx >> w) & 1
    part = state[idx ^ (1 << w)]
    return np.where(hi == 0, state + part, part - state) / np.sqrt(2.0)


def _apply_cx(state, c: int, t: int):
    idx = np.arange(len(state))
    src = idx ^ (((idx >> c) & 1) << t)
    return state[src]


def _prob_one(state, w: int) -> float:
    idx = np.arange(len(state))
    return float(np.sum(np.abs(state[(idx >> w) & 1 == 1]) ** 2))


def _collapse(state, w: int, outcome: int):
    idx = np.arange(len(state))
    keep = ((idx >> w) & 1) == outcome
    out = np.where(keep, state, 0.0)
    return out / np.linalg.norm(out)


def run_shot_fallback(
    cc: CompiledCircuit, seed: int, p2: float, spam: float
) -> np.ndarray:
    """Execute one trajectory; returns the classical bit record (int8)."""
    dim = 1 << cc.n_wires
    state = np.zeros(dim, dtype=complex)
    state[0] = 1.0
    bits = np.zeros(cc.n_bits, dtype=np.int8)
    rng = SplitMix64(seed)
    for i in range(cc.n_ops):
        op = cc.code[i]
        if op == OP_ROT:
            state = _apply_rot(state, int(cc.xmask[i]), int(cc.zmask[i]), cc.angle[i])
        elif op == OP_H:
            state = _apply_h(state, cc.wa[i])
        elif op == OP_PAULI:
            state = _apply_pauli(state, int(cc.xmask[i]), int(cc.zmask[i]))
        elif op == OP_CX:
            state = _apply_cx(state, cc.wa[i], cc.wb[i])
        elif op == OP_MEASURE:
            p1 = _prob_one(state, cc.wa[i])
            outcome = 1 if rng.next_double() < p1 else 0
            state = _collapse(state, cc.wa[i], outcome)
            if spam > 0.0 and rng.next_double() < spam:
                outcome ^= 1
            bits[cc.bit[i]] = outcome
        elif op == OP_RESET:
            p1 = _prob_one(state, cc.wa[i])
            if p1 < 1e-12:
                outcome = 0
            elif p1 > 1.0 - 1e-12:
                outcome = 1
            else:
                outcome = 1 if rng.next_double() < p1 else 0
            state = _collapse(state, cc.wa[i], outcome)
            if outcome == 1:
                state = _apply_pauli(state, 1 << cc.wa[i], 0)
        elif op == OP_CPAULI:
            if bits[cc.bit[i]] == cc.value[i]:
                state = _apply_pauli(state, int(cc.xmask[i]), int(cc.zmask[i]))
        if cc.entangler[i] and p2 > 0.0 and rng.next_double() < p2:
            e = 1 + min(14, int(rng.next_double() * 15.0))
            ex, ez = pauli_error_masks(e, cc.wa[i], cc.wb[i])
            state = _apply_pauli(state, ex, ez)
    return bits
