"""Flat array encoding of a circuit, shared by both execution kernels.

Op codes: 0 rot, 1 h, 2 pauli, 3 cx, 4 measure, 5 reset, 6 cpauli.
Pauli content is carried as (x, z) masks with the phase convention
P = i^popcount(x & z) X^x Z^z. Depolarizing noise attaches to entangling
ops (CX and >=2-wire rotations) on the first two wires of the op.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuit import (
    KIND_CPAULI,
    KIND_CX,
    KIND_H,
    KIND_MEASURE,
    KIND_PAULI,
    KIND_RESET,
    KIND_ROT,
    CircuitIR,
)

OP_ROT, OP_H, OP_PAULI, OP_CX, OP_MEASURE, OP_RESET, OP_CPAULI = range(7)

_KIND_TO_CODE = {
    KIND_ROT: OP_ROT,
    KIND_H: OP_H,
    KIND_PAULI: OP_PAULI,
    KIND_CX: OP_CX,
    KIND_MEASURE: OP_MEASURE,
    KIND_RESET: OP_RESET,
    KIND_CPAULI: OP_CPAULI,
}


def _letters_to_masks(letters: str, wires: tuple[int, ...]) -> tuple[int, int]:
    x = z = 0
    for letter, w in zip(letters, wires):
        if letter in "XY":
            x |= 1 << w
        if letter in "YZ":
            z |= 1 << w
    return x, z


@dataclass
class CompiledCircuit:
    n_wires: int
    n_bits: int
    code: np.ndarray  # int32
    wa: np.ndarray  # int32, first wire / control
    wb: np.ndarray  # int32, second wire / target (-1 if none)
    xmask: np.ndarray  # uint64
    zmask: np.ndarray  # uint64
    angle: np.ndarray  # float64
    bit: np.ndarray  # int32
    value: np.ndarray  # int32
    entangler: np.ndarray  # uint8

    @property
    def n_ops(self) -> int:
        return len(self.code)


def compile_circuit(circ: CircuitIR) -> CompiledCircuit:
    n = len(circ.ops)
    code = np.zeros(n, dtype=np.int32)
    wa = np.full(n, -1, dtype=np.int32)
    wb = np.full(n, -1, dtype=np.int32)
    xm = np.zeros(n, dtype=np.uint64)
    zm = np.zeros(n, dtype=np.uint64)
    ang = np.zeros(n, dtype=np.float64)
    bit = np.full(n, -1, dtype=np.int32)
    val = np.zeros(n, dtype=np.int32)
    ent = np.zeros(n, dtype=np.uint8)
    for i, op in enumerate(circ.ops):
        code[i] = _KIND_TO_CODE[op.kind]
        if op.wires:
            wa[i] = op.wires[0]
        if len(op.wires) > 1:
            wb[i] = op.wires[1]
        if op.kind in (KIND_ROT, KIND_PAULI, KIND_CPAULI):
            x, z = _letters_to_masks(op.letters, op.wires)
            xm[i], zm[i] = x, z
        ang[i] = op.angle
        bit[i] = op.bit
        val[i] = op.value
        ent[i] = 1 if op.is_entangler() else 0
    return CompiledCircuit(
        n_wires=circ.n_wires,
        n_bits=circ.n_bits,
        code=code,
        wa=wa,
        wb=wb,
        xmask=xm,
        zmask=zm,
        angle=ang,
        bit=bit,
        value=val,
        entangler=ent,
    )


# two-qubit depolarizing: error index e in 1..15 encodes (pa, pb) = (e & 3, e >> 2)
# with 0=I, 1=X, 2=Y, 3=Z on (wa, wb)


def pauli_error_masks(e: int, wire_a: int, wire_b: int) -> tuple[int, int]:
    x = z = 0
    for p, w in ((e & 3, wire_a), (e >> 2, wire_b)):
        if p in (1, 2):
            x |= 1 << w
        if p in (2, 3):
            z |= 1 << w
    return x, z
