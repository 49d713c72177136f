"""Ordered gate-list IR shared by the compilers and the simulator.

Wire 0 is the least significant statevector bit. Rotation convention is
R_P(theta) = exp(-i theta P / 2) for every single- and multi-wire Pauli
rotation. Multi-wire rotations are first-class ops: on trapped-ion-style
hardware an off-diagonal Pauli rotation is one globally-entangling gate,
while diagonal (Z-only) rotations are emitted as CX parity ladders by the
circuit builders, so the two-qubit count of a circuit is just the number
of two-or-more-wire entangling ops it contains.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

KIND_ROT = "rot"  # Pauli rotation, letters over wires
KIND_H = "h"
KIND_PAULI = "pauli"  # literal Pauli product gate
KIND_CX = "cx"
KIND_MEASURE = "measure"
KIND_RESET = "reset"
KIND_CPAULI = "cpauli"  # Pauli applied when classical bit == value


@dataclass(frozen=True)
class Op:
    kind: str
    wires: tuple[int, ...]
    letters: str = ""  # for rot/pauli/cpauli, aligned with wires
    angle: float = 0.0
    bit: int = -1  # classical bit for measure/cpauli
    value: int = 1  # condition value for cpauli
    tag: str = ""  # logical/physical/syndrome bookkeeping label

    def is_entangler(self) -> bool:
        if self.kind == KIND_CX:
            return True
        return self.kind == KIND_ROT and len(self.wires) >= 2

    def __str__(self) -> str:
        ws = ",".join(map(str, self.wires))
        if self.kind == KIND_ROT:
            body = f"rot {self.letters} {ws} {self.angle:+.12f}"
        elif self.kind == KIND_CX:
            body = f"cx {ws}"
        elif self.kind == KIND_H:
            body = f"h {ws}"
        elif self.kind == KIND_PAULI:
            body = f"pauli {self.letters} {ws}"
        elif self.kind == KIND_MEASURE:
            body = f"measure {ws} -> c{self.bit}"
        elif self.kind == KIND_RESET:
            body = f"reset {ws}"
        elif self.kind == KIND_CPAULI:
            body = f"cpauli {self.letters} {ws} if c{self.bit}=={self.value}"
        else:
            raise ValueError(self.kind)
        return body + (f"  # {self.tag}" if self.tag else "")


@dataclass
class CircuitIR:
    """Gate list over n_wires quantum wires and n_bits classical bits."""

    n_wires: int
    n_bits: int = 0
    ops: list[Op] = field(default_factory=list)

    # -- builders -------------------------------------------------------

    def _check(self, wires: tuple[int, ...]):
        for w in wires:
            if not 0 <= w < self.n_wires:
                raise ValueError(f"wire {w} out of range")

    def rot(self, letters: str, wires: tuple[int, ...], angle: float, tag: str = ""):
        self._check(wires)
        if len(letters) != len(wires) or any(c not in "XYZ" for c in letters):
            raise ValueError(f"bad rotation letters {letters!r}")
        self.ops.append(Op(KIND_ROT, tuple(wires), letters, float(angle), tag=tag))

    def h(self, wire: int, tag: str = ""):
        self._check((wire,))
        self.ops.append(Op(KIND_H, (wire,), tag=tag))

    def pauli(self, letters: str, wires: tuple[int, ...], tag: str = ""):
        self._check(wires)
        self.ops.append(Op(KIND_PAULI, tuple(wires), letters, tag=tag))

    def cx(self, control: int, target: int, tag: str = ""):
        self._check((control, target))
        self.ops.append(Op(KIND_CX, (control, target), tag=tag))

    def measure(self, wire: int, bit: int, tag: str = ""):
        self._check((wire,))
        self.n_bits = max(self.n_bits, bit + 1)
        self.ops.append(Op(KIND_MEASURE, (wire,), bit=bit, tag=tag))

    def reset(self, wire: int, tag: str = ""):
        self._check((wire,))
        self.ops.append(Op(KIND_RESET, (wire,), tag=tag))

    def cpauli(self, letters: str, wires: tuple[int, ...], bit: int, value: int, tag: str = ""):
        self._check(wires)
        self.n_bits = max(self.n_bits, bit + 1)
        self.ops.append(Op(KIND_CPAULI, tuple(wires), letters, bit=bit, value=value, tag=tag))

    def diagonal_rot(self, zwires: tuple[int, ...], angle: float, tag: str = ""):
        """Multi-Z rotation as a CX parity ladder onto the lowest wire."""
        self._check(zwires)
        root = min(zwires)
        others = [w for w in zwires if w != root]
        for w in others:
            self.cx(w, root, tag=tag)
        self.rot("Z", (root,), angle, tag=tag)
        for w in reversed(others):
            self.cx(w, root, tag=tag)

    def extend(self, other: "CircuitIR"):
        if other.n_wires > self.n_wires:
            raise ValueError("wire count mismatch")
        self.n_bits = max(self.n_bits, other.n_bits)
        self.ops.extend(other.ops)

    # -- inspection -------------------------------------------------------

    def count_two_qubit_gates(self) -> int:
        """Entangling-gate count: CX and any >=2-wire Pauli rotation."""
        return sum(1 for op in self.ops if op.is_entangler())

    def count_measurements(self) -> int:
        return sum(1 for op in self.ops if op.kind == KIND_MEASURE)

    def tags(self) -> list[str]:
        return [op.tag for op in self.ops]

    def retagged(self, tag: str) -> "CircuitIR":
        out = CircuitIR(self.n_wires, self.n_bits)
        out.ops = [replace(op, tag=tag) for op in self.ops]
        return out

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        head = f"wires {self.n_wires} bits {self.n_bits}"
        return "\n".join([head] + [str(op) for op in self.ops])

    def __repr__(self) -> str:
        return (
            f"CircuitIR(n_wires={self.n_wires}, n_bits={self.n_bits}, "
            f"n_ops={len(self.ops)}, n_2q={self.count_two_qubit_gates()})"
        )


def lower_diagonal_rotations(circ: CircuitIR) -> CircuitIR:
    """Replace multi-wire all-Z rotations with CX parity ladders.

    Unitary-preserving; used when emitting bare (unencoded) circuits so
    diagonal layers carry their ladder gate cost explicitly.
    """
    out = CircuitIR(circ.n_wires, circ.n_bits)
    for op in circ.ops:
        if op.kind == KIND_ROT and len(op.wires) >= 2 and set(op.letters) == {"Z"}:
            out.diagonal_rot(op.wires, op.angle, tag=op.tag)
        else:
            out.ops.append(op)
    return out
