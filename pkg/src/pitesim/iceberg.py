"""Distance-2 error-detecting layer: encoding, logical compilation,
syndrome extraction, post-measurement re-encoding, and readout decoding.

The code stores k (even) logical qubits in k+2 physical wires; the two
extra wires carry the X-type and Z-type stabilizer redundancy (every
physical wire in X, every physical wire in Z). Logical basis state |x>
maps to (|0>_qz |f_x>_qx |x>_D + |1>_qz |~f_x>_qx |~x>_D)/sqrt(2) with
f_x the parity of x. Any logical Pauli then has a physical representative
of weight <= its naive weight, obtained by optionally multiplying the two
stabilizers; rotations compile to one entangling gate whenever that
representative has weight two, and off-diagonal higher-weight
representatives stay single native multi-wire rotations.

Wire roles for k=4: data 0..3 (wire 0 doubles as the filter-step ancilla),
qX = 4, qZ = 5, check wires qM0 = 6 (X-type, also the flag) and qM1 = 7.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import CircuitIR, KIND_CPAULI, KIND_MEASURE, KIND_PAULI, KIND_RESET, KIND_ROT
from .pauli import mask_to_string, mul_masks


@dataclass(frozen=True)
class IcebergLayout:
    """Wire assignment for the k+2 encoding plus two check wires."""

    k: int = 4

    def __post_init__(self):
        if self.k < 2 or self.k % 2:
            raise ValueError("logical count must be even and at least 2")

    @property
    def data(self) -> tuple[int, ...]:
        return tuple(range(self.k))

    @property
    def qx(self) -> int:
        return self.k

    @property
    def qz(self) -> int:
        return self.k + 1

    @property
    def qm0(self) -> int:
        return self.k + 2

    @property
    def qm1(self) -> int:
        return self.k + 3

    @property
    def n_wires(self) -> int:
        return self.k + 4

    @property
    def code_wires(self) -> tuple[int, ...]:
        return tuple(range(self.k + 2))


# ---------------------------------------------------------------------------
# logical Pauli representatives
# ---------------------------------------------------------------------------


def _stabilizer_masks(layout: IcebergLayout) -> tuple[tuple[int, int], tuple[int, int]]:
    all_code = (1 << (layout.k + 2)) - 1
    return (all_code, 0), (0, all_code)  # S_X, S_Z


def physical_rep(a: int, b: int, layout: IcebergLayout) -> tuple[int, int, int]:
    """Minimum-weight physical (sign, x, z) acting as the logical (a, b).

    a and b are X- and Z-masks over the k logical qubits. Candidates are
    the naive representative and its products with the two stabilizers.
    """
    k = layout.k
    if a >> k or b >> k:
        raise ValueError("logical masks exceed the register")
    x0 = a | ((a.bit_count() & 1) << layout.qx)
    z0 = b | ((b.bit_count() & 1) << layout.qz)
    best = (1, x0, z0)
    best_w = (x0 | z0).bit_count()
    sx, sz = _stabilizer_masks(layout)
    for mults in ((sx,), (sz,), (sx, sz)):
        x, z, phase = x0, z0, complex(1.0)
        for (mx, mz) in mults:
            x, z, ph = mul_masks(x, z, mx, mz)
            phase *= ph
        if abs(phase.imag) > 1e-12:
            raise RuntimeError("non-real stabilizer multiple; logical op malformed")
        w = (x | z).bit_count()
        if w < best_w:
            best = (int(np.sign(phase.real)), x, z)
            best_w = w
    return best


def _masks_from_letters(letters: str, wires: tuple[int, ...]) -> tuple[int, int]:
    a = b = 0
    for letter, w in zip(letters, wires):
        if letter in "XY":
            a |= 1 << w
        if letter in "YZ":
            b |= 1 << w
    return a, b


def _letters_from_masks(x: int, z: int, n: int) -> tuple[str, tuple[int, ...]]:
    wires = tuple(q for q in range(n) if ((x | z) >> q) & 1)
    s = mask_to_string(x, z, n)
    letters = "".join(s[n - 1 - q] for q in wires)
    return letters, wires


def emit_physical_rotation(
    circ: CircuitIR, x: int, z: int, angle: float, tag: str = ""
):
    """Physical rotation emission with the reference gate accounting.

    Off-diagonal representatives are one native (globally entangling)
    rotation. Diagonal pair representatives are two half-angle ZZ pulses:
    the same entangler count as a CX-conjugated ladder but without its
    fault amplification (a single fault inside a CX sandwich walks out as
    an undetectable weight-two error; between commuting half pulses it
    stays weight one and is caught by the next check).
    """
    letters, wires = _letters_from_masks(x, z, circ.n_wires)
    if x == 0 and len(wires) == 2:
        circ.rot(letters, wires, angle / 2, tag=tag)
        circ.rot(letters, wires, angle / 2, tag=tag)
    else:
        circ.rot(letters, wires, angle, tag=tag)


# ---------------------------------------------------------------------------
# block circuits
# ---------------------------------------------------------------------------


def encode_zero_circuit(layout: IcebergLayout, flag_bit: int = 0) -> CircuitIR:
    """Flagged preparation of the logical all-zero codeword.

    A CX chain builds the two-branch superposition; the flag wire checks
    the chain-end parity (qz xor qx), which any mid-chain flip upsets.
    Seven entangling gates for k = 4.
    """
    circ = CircuitIR(layout.n_wires)
    circ.h(layout.qz, tag="encode")
    chain = (layout.qz, *layout.data, layout.qx)
    for a, b in zip(chain, chain[1:]):
        circ.cx(a, b, tag="encode")
    circ.cx(layout.qz, layout.qm0, tag="encode-flag")
    circ.cx(layout.qx, layout.qm0, tag="encode-flag")
    circ.measure(layout.qm0, flag_bit, tag="encode-flag")
    circ.reset(layout.qm0, tag="encode-flag")
    return circ


def syndrome_circuit(layout: IcebergLayout, bit_x: int, bit_z: int, tag: str = "syndrome") -> CircuitIR:
    """Joint stabilizer check with mutually flagging check wires.

    The X-type check wire fans out through every code wire while the
    Z-type wire collects parities. The first and last code wires use a
    collect-then-fan order (the middle ones fan-then-collect), which keeps
    the two branch parities aligned on clean codewords while letting each
    check wire flag faults on the other. Twelve entangling gates.
    """
    circ = CircuitIR(layout.n_wires)
    order = (layout.qz, *layout.data, layout.qx)
    first, last = order[0], order[-1]
    circ.h(layout.qm0, tag=tag)
    circ.cx(first, layout.qm1, tag=tag)
    circ.cx(layout.qm0, first, tag=tag)
    for t in order[1:-1]:
        circ.cx(layout.qm0, t, tag=tag)
        circ.cx(t, layout.qm1, tag=tag)
    circ.cx(last, layout.qm1, tag=tag)
    circ.cx(layout.qm0, last, tag=tag)
    circ.h(layout.qm0, tag=tag)
    circ.measure(layout.qm0, bit_x, tag=tag)
    circ.measure(layout.qm1, bit_z, tag=tag)
    circ.reset(layout.qm0, tag=tag)
    circ.reset(layout.qm1, tag=tag)
    return circ


def measure_and_reencode(
    layout: IcebergLayout,
    c0_bit: int,
    cz_bit: int,
    flag_bit: int,
    final: bool = False,
) -> CircuitIR:
    """Collapse the filter-step branches and restore a codeword.

    Measures data wire 0 and qz; outcomes with equal bits are the success
    branch. Conditional X gates bring all four outcomes to one reference
    product state, and a flagged CX fan rebuilds the codeword carrying the
    post-measurement logical state. With final=True the block stops after
    the two measurements (destructive readout follows).
    """
    circ = CircuitIR(layout.n_wires)
    circ.measure(0, c0_bit, tag="step-anc")
    circ.measure(layout.qz, cz_bit, tag="step-anc")
    if final:
        return circ
    sys_wires = tuple(w for w in layout.data if w != 0)
    circ.cpauli("X" * len(sys_wires), sys_wires, bit=cz_bit, value=0, tag="reencode")
    circ.cpauli("X", (layout.qx,), bit=c0_bit, value=0, tag="reencode")
    circ.reset(0, tag="reencode")
    circ.reset(layout.qz, tag="reencode")
    circ.h(layout.qz, tag="reencode")
    for t in (0, layout.qx, *sys_wires):
        circ.cx(layout.qz, t, tag="reencode")
    for t in (layout.qx, *sys_wires):
        circ.pauli("X", (t,), tag="reencode")
    circ.cx(layout.qz, layout.qm0, tag="reencode-flag")
    circ.cx(0, layout.qm0, tag="reencode-flag")
    circ.measure(layout.qm0, flag_bit, tag="reencode-flag")
    circ.reset(layout.qm0, tag="reencode-flag")
    return circ


def final_readout_circuit(layout: IcebergLayout, first_bit: int) -> CircuitIR:
    """Destructive Z-basis readout of qx and the non-ancilla data wires.

    Bits are laid out as first_bit + (qx, data1, data2, ...).
    """
    circ = CircuitIR(layout.n_wires)
    circ.measure(layout.qx, first_bit, tag="readout")
    for i, w in enumerate(w for w in layout.data if w != 0):
        circ.measure(w, first_bit + 1 + i, tag="readout")
    return circ


def final_readout_decode(wire_bits: dict[int, int], layout: IcebergLayout) -> int | None:
    """Parity-check and decode a full Z-basis record.

    wire_bits maps every code wire (data, qx, qz) to its recorded bit; the
    data-0 and qz entries are the last step's mid-circuit outcomes. Odd
    total parity means a detected fault: returns None (discard). Otherwise
    returns the logical bitstring (bit 0 is the step ancilla: 0 = success).
    """
    parity = 0
    for w in layout.code_wires:
        parity ^= wire_bits[w] & 1
    if parity:
        return None
    cz = wire_bits[layout.qz] & 1
    logical = 0
    for i in layout.data:
        logical |= ((wire_bits[i] ^ cz) & 1) << i
    return logical


# ---------------------------------------------------------------------------
# logical-to-physical compilation
# ---------------------------------------------------------------------------


@dataclass
class CompileResult:
    circuit: CircuitIR
    cz_bits: list[int] = field(default_factory=list)
    flag_bits: list[int] = field(default_factory=list)


def compile_logical(circ: CircuitIR, layout: IcebergLayout) -> CompileResult:
    """Map a logical circuit to the physical register.

    Supported logical ops: Pauli rotations of any weight, Pauli gates,
    classically conditioned Paulis, and measure/reset of logical wire 0
    (which becomes a full measure-and-re-encode block).
    """
    if circ.n_wires != layout.k:
        raise ValueError(f"logical circuit must use exactly {layout.k} wires")
    out = CircuitIR(layout.n_wires, n_bits=circ.n_bits)
    result = CompileResult(out)
    next_aux = circ.n_bits
    pending_reset = False
    for op in circ.ops:
        if pending_reset:
            if op.kind != KIND_RESET or op.wires != (0,):
                raise ValueError("measurement of wire 0 must be followed by its reset")
            pending_reset = False
            continue
        if op.kind == KIND_ROT:
            a, b = _masks_from_letters(op.letters, op.wires)
            sign, x, z = physical_rep(a, b, layout)
            emit_physical_rotation(out, x, z, sign * op.angle, tag=op.tag)
        elif op.kind == KIND_PAULI:
            a, b = _masks_from_letters(op.letters, op.wires)
            _, x, z = physical_rep(a, b, layout)
            letters, wires = _letters_from_masks(x, z, layout.n_wires)
            out.pauli(letters, wires, tag=op.tag)
        elif op.kind == KIND_CPAULI:
            a, b = _masks_from_letters(op.letters, op.wires)
            _, x, z = physical_rep(a, b, layout)
            letters, wires = _letters_from_masks(x, z, layout.n_wires)
            out.cpauli(letters, wires, bit=op.bit, value=op.value, tag=op.tag)
        elif op.kind == KIND_MEASURE and op.wires == (0,):
            cz_bit, flag_bit = next_aux, next_aux + 1
            next_aux += 2
            result.cz_bits.append(cz_bit)
            result.flag_bits.append(flag_bit)
            out.extend(measure_and_reencode(layout, op.bit, cz_bit, flag_bit))
            pending_reset = True
        else:
            raise ValueError(f"unsupported logical op: {op}")
    if pending_reset:
        raise ValueError("dangling measurement of wire 0 without reset")
    return result


# ---------------------------------------------------------------------------
# codeword projections (testing and decoding aids)
# ---------------------------------------------------------------------------


def codeword_vector(x: int, layout: IcebergLayout, n_wires: int | None = None) -> np.ndarray:
    """Statevector of the codeword for logical basis state x."""
    k = layout.k
    if not 0 <= x < 1 << k:
        raise ValueError("logical index out of range")
    n = layout.n_wires if n_wires is None else n_wires
    vec = np.zeros(1 << n, dtype=complex)
    f = x.bit_count() & 1
    idx0 = x | (f << layout.qx)
    comp = (~x) & ((1 << k) - 1)
    idx1 = comp | ((f ^ 1) << layout.qx) | (1 << layout.qz)
    vec[idx0] = 1.0 / np.sqrt(2.0)
    vec[idx1] = 1.0 / np.sqrt(2.0)
    return vec


def logical_state_vector(state: np.ndarray, layout: IcebergLayout) -> tuple[np.ndarray, float]:
    """Project a physical state onto the code space.

    Returns (logical amplitudes, leakage norm outside the code space).
    The check wires must be disentangled (|0>) for the projection to make
    sense; amplitude on other check-wire settings counts as leakage.
    """
    k = layout.k
    amps = np.zeros(1 << k, dtype=complex)
    for x in range(1 << k):
        cw = codeword_vector(x, layout, n_wires=int(np.log2(len(state))))
        amps[x] = np.vdot(cw, state)
    leakage = float(np.linalg.norm(state) ** 2 - np.linalg.norm(amps) ** 2)
    return amps, leakage
