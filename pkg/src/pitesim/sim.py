"""Trajectory execution, exact branch enumeration, and run statistics.

Noise model: with probability p2 after every entangling gate, one of the
15 nontrivial two-qubit Paulis (uniform) hits the gate's first two wires;
optional SPAM flips each recorded measurement with its own probability.
Single-qubit gates are noiseless. Shots are independent and reproducible:
shot i of a run uses the deterministic stream seeded by (seed, i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._kernels import HAVE_EXTENSION, compile_circuit, run_shot_compiled
from ._kernels.compiled import (
    OP_CPAULI,
    OP_CX,
    OP_H,
    OP_MEASURE,
    OP_PAULI,
    OP_RESET,
    OP_ROT,
    CompiledCircuit,
)
from ._kernels.fallback import (
    _apply_cx,
    _apply_h,
    _apply_pauli,
    _apply_rot,
    _collapse,
    _prob_one,
)
from .circuit import CircuitIR


@dataclass(frozen=True)
class NoiseModel:
    """Two-qubit depolarizing strength plus optional readout flips."""

    p2: float = 0.0
    spam: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.p2 < 1.0 and 0.0 <= self.spam < 1.0):
            raise ValueError("probabilities must lie in [0, 1)")


IDEAL = NoiseModel()


_M64 = (1 << 64) - 1


def _mix64(x: int) -> int:
    """splitmix64 finalizer; avalanches all input bits."""
    x &= _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def shot_seed(seed: int, shot: int) -> int:
    """Stable, decorrelated per-shot stream seed.

    Mixing avalanches (seed, shot) so per-shot streams neither overlap nor
    slide into each other (raw arithmetic seeds would differ by the stream
    increment and share draws between shots).
    """
    return _mix64(_mix64(seed) ^ ((shot * 0xC2B2AE3D27D4EB4F + 0x9E3779B97F4A7C15) & _M64))


class ShotRunner:
    """Reusable runner for many shots of one circuit."""

    def __init__(self, circ: CircuitIR, noise: NoiseModel = IDEAL, use_extension: bool | None = None):
        self.circuit = circ
        self.noise = noise
        self.compiled = compile_circuit(circ)
        self.use_extension = HAVE_EXTENSION if use_extension is None else use_extension

    def run(self, seed: int, shot: int = 0) -> np.ndarray:
        return run_shot_compiled(
            self.compiled,
            shot_seed(seed, shot),
            self.noise.p2,
            self.noise.spam,
            use_extension=self.use_extension,
        )


def run_shot(circ: CircuitIR, noise: NoiseModel, seed: int) -> np.ndarray:
    """Single trajectory; returns the classical bit record."""
    return ShotRunner(circ, noise).run(seed)


# ---------------------------------------------------------------------------
# exact (noiseless) branch enumeration
# ---------------------------------------------------------------------------


@dataclass
class BranchLeaf:
    probability: float
    bits: np.ndarray
    state: np.ndarray


@dataclass
class BranchResult:
    leaves: list[BranchLeaf]
    measure_bits: list[int]  # bit ids in measurement order

    def total_probability(self) -> float:
        return float(sum(l.probability for l in self.leaves))

    def distribution(self, marginal: Callable[[np.ndarray], np.ndarray] | None = None) -> np.ndarray:
        """Probability-weighted mixture distribution over basis states."""
        out = None
        for leaf in self.leaves:
            d = np.abs(leaf.state) ** 2 * leaf.probability
            if marginal is not None:
                d = marginal(d)
            out = d if out is None else out + d
        return out


MAX_BRANCH_MEASUREMENTS = 32
_BRANCH_TOL = 1e-12


def run_noiseless_branches(
    circ: CircuitIR,
    postselect: Callable[[int, np.ndarray], int | None] | None = None,
    max_leaves: int = 1 << 20,
) -> BranchResult:
    """Enumerate measurement branches exactly (no sampling).

    `postselect(bit_id, bits_so_far)` may force an outcome; branches of the
    other outcome are dropped but their probability loss is reflected in
    the leaf probabilities. Deterministic outcomes do not branch.
    """
    cc = compile_circuit(circ)
    n_branching = sum(
        1 for i in range(cc.n_ops) if cc.code[i] == OP_MEASURE
    )
    if n_branching > MAX_BRANCH_MEASUREMENTS and postselect is None:
        # only a cap on true branching saves us; enforced during recursion
        pass
    dim = 1 << cc.n_wires
    init = np.zeros(dim, dtype=complex)
    init[0] = 1.0
    leaves: list[BranchLeaf] = []
    measure_bits = [int(cc.bit[i]) for i in range(cc.n_ops) if cc.code[i] == OP_MEASURE]

    def walk(i: int, state: np.ndarray, bits: np.ndarray, prob: float, splits: int):
        if len(leaves) >= max_leaves:
            raise RuntimeError("branch enumeration exceeded the leaf limit")
        while i < cc.n_ops:
            op = cc.code[i]
            if op == OP_ROT:
                state = _apply_rot(state, int(cc.xmask[i]), int(cc.zmask[i]), cc.angle[i])
            elif op == OP_H:
                state = _apply_h(state, cc.wa[i])
            elif op == OP_PAULI:
                state = _apply_pauli(state, int(cc.xmask[i]), int(cc.zmask[i]))
            elif op == OP_CX:
                state = _apply_cx(state, cc.wa[i], cc.wb[i])
            elif op == OP_RESET:
                p1 = _prob_one(state, cc.wa[i])
                if p1 > 1.0 - _BRANCH_TOL:
                    state = _apply_pauli(_collapse(state, cc.wa[i], 1), 1 << cc.wa[i], 0)
                elif p1 > _BRANCH_TOL:
                    raise RuntimeError("reset of a superposed wire is not branch-enumerable")
            elif op == OP_CPAULI:
                if bits[cc.bit[i]] == cc.value[i]:
                    state = _apply_pauli(state, int(cc.xmask[i]), int(cc.zmask[i]))
            elif op == OP_MEASURE:
                w, b = cc.wa[i], int(cc.bit[i])
                p1 = _prob_one(state, w)
                forced = postselect(b, bits) if postselect is not None else None
                options: list[int]
                if forced is not None:
                    options = [forced]
                elif p1 < _BRANCH_TOL:
                    options = [0]
                elif p1 > 1.0 - _BRANCH_TOL:
                    options = [1]
                else:
                    options = [0, 1]
                    if splits >= MAX_BRANCH_MEASUREMENTS:
                        raise RuntimeError("too many branching measurements to enumerate")
                    splits += 1
                if len(options) == 2:
                    for outcome in options:
                        po = p1 if outcome else 1.0 - p1
                        nb = bits.copy()
                        nb[b] = outcome
                        walk(i + 1, _collapse(state, w, outcome), nb, prob * po, splits)
                    return
                outcome = options[0]
                po = p1 if outcome else 1.0 - p1
                if po < _BRANCH_TOL:
                    return  # postselected branch has no amplitude
                state = _collapse(state, w, outcome)
                bits = bits.copy()
                bits[b] = outcome
                prob *= po
            i += 1
        leaves.append(BranchLeaf(probability=prob, bits=bits, state=state))

    walk(0, init, np.zeros(max(cc.n_bits, 1), dtype=np.int8), 1.0, 0)
    return BranchResult(leaves=leaves, measure_bits=measure_bits)


def circuit_unitary(circ: CircuitIR) -> np.ndarray:
    """Dense unitary of a measurement-free circuit."""
    cc = compile_circuit(circ)
    dim = 1 << cc.n_wires
    cols = []
    for b in range(dim):
        state = np.zeros(dim, dtype=complex)
        state[b] = 1.0
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
            else:
                raise ValueError("circuit_unitary requires a measurement-free circuit")
        cols.append(state)
    return np.column_stack(cols)


def apply_circuit(circ: CircuitIR, state: np.ndarray) -> np.ndarray:
    """Apply a measurement-free circuit to a statevector."""
    cc = compile_circuit(circ)
    out = state.astype(complex, copy=True)
    for i in range(cc.n_ops):
        op = cc.code[i]
        if op == OP_ROT:
            out = _apply_rot(out, int(cc.xmask[i]), int(cc.zmask[i]), cc.angle[i])
        elif op == OP_H:
            out = _apply_h(out, cc.wa[i])
        elif op == OP_PAULI:
            out = _apply_pauli(out, int(cc.xmask[i]), int(cc.zmask[i]))
        elif op == OP_CX:
            out = _apply_cx(out, cc.wa[i], cc.wb[i])
        else:
            raise ValueError("apply_circuit requires a measurement-free circuit")
    return out


# ---------------------------------------------------------------------------
# run statistics
# ---------------------------------------------------------------------------


def discard_model(n2q: int, p2: float) -> float:
    """Expected discard fraction when every fault were detected."""
    if n2q < 0:
        raise ValueError("gate count must be non-negative")
    return 1.0 - (1.0 - p2) ** n2q


@dataclass(frozen=True)
class MseStats:
    bias: float
    var: float
    mse: float
    n: int


def mse_stats(samples, truth: float) -> MseStats:
    """Bias/variance split of a projector-observable estimator.

    samples are per-circuit outcomes (indicators for projectors); the
    variance is the second-moment form divided by the retained count.
    """
    arr = np.asarray(samples, dtype=float)
    n = arr.size
    if n == 0:
        raise ValueError("no retained outcomes")
    mean = float(arr.mean())
    second = float((arr**2).mean())
    bias = mean - truth
    var = (second - mean**2) / n
    return MseStats(bias=bias, var=var, mse=bias**2 + var, n=n)


def classical_fidelity(p, q) -> float:
    """Squared Bhattacharyya overlap of two outcome distributions."""
    pa, qa = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if pa.shape != qa.shape:
        raise ValueError("distributions must share support")
    if np.any(pa < -1e-12) or np.any(qa < -1e-12):
        raise ValueError("negative probabilities")
    return float(np.sum(np.sqrt(np.clip(pa, 0, None) * np.clip(qa, 0, None))) ** 2)


def count_two_qubit_gates(circ: CircuitIR) -> int:
    return circ.count_two_qubit_gates()


@dataclass
class TrajectoryState:
    """Mutable per-shot record assembled by the experiment driver."""

    bits: np.ndarray
    discarded: bool = False
    first_failed_check: str = ""
    step_successes: list[int] = field(default_factory=list)
    decoded: int = -1
