"""Probabilistic imaginary-time step circuits and their dense oracles.

One step embeds the nonunitary filter sin(phi - dtau*s1*H) into a unitary
on system + ancilla: a fixed ancilla gate U1, conditioned real-time
evolution exp(-i dtau s1 (H (x) Z)), and a second ancilla gate U2. With a
constant energy shift the filter becomes cos((H - E_target) dtau s1), so
the target eigenstate passes unattenuated and the step acts as a cosine
filter around E_target.

Conditioned evolution is Trotterized to second order in the diagonal /
off-diagonal split: per slice the gate order in time is
[half diagonal layer][V1][V2][half diagonal layer]; adjacent half layers
of consecutive slices are emitted separately (syndrome measurements sit
between them in the error-detected pipeline).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import CircuitIR
from .pauli import mask_to_string
from .qmap import CrteGenerator

SQRT_HALF = 1.0 / math.sqrt(2.0)


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PiteConstants:
    """Derived step constants for a given filter strength m0."""

    m0: float
    s1: float
    phi: float
    theta0: float
    kappa: int


def pite_constants(m0: float) -> PiteConstants:
    if not 0.0 < m0 < 1.0:
        raise ValueError("m0 must lie strictly between 0 and 1")
    if abs(m0 - SQRT_HALF) < 1e-12:
        raise ValueError("m0 = 1/sqrt(2) is excluded (vanishing rotation)")
    s1 = m0 / math.sqrt(1.0 - m0 * m0)
    phi = math.atan(s1)
    kappa = 1 if m0 > SQRT_HALF else -1
    theta0 = kappa * math.acos((m0 + math.sqrt(1.0 - m0 * m0)) * SQRT_HALF)
    return PiteConstants(m0=m0, s1=s1, phi=phi, theta0=theta0, kappa=kappa)


def effective_shift(consts: PiteConstants, dtau: float, target_energy: float) -> float:
    """Shift that turns the step filter into cos((E - target) dtau s1)."""
    if dtau <= 0:
        raise ValueError("shifted steps need dtau > 0")
    return target_energy + (math.pi / 2 - consts.phi) / (dtau * consts.s1)


# ---------------------------------------------------------------------------
# dense oracles
# ---------------------------------------------------------------------------


def approx_operator(h: np.ndarray, dtau: float, m0: float) -> np.ndarray:
    """sin(-H dtau s1 + phi) by spectral calculus; the success-branch map."""
    c = pite_constants(m0)
    w, v = np.linalg.eigh(h)
    return (v * np.sin(-w * dtau * c.s1 + c.phi)) @ v.conj().T


def shifted_filter_operator(h: np.ndarray, dtau: float, m0: float, target_energy: float) -> np.ndarray:
    """cos((H - target) dtau s1): the success branch of a shifted step."""
    c = pite_constants(m0)
    w, v = np.linalg.eigh(h)
    return (v * np.cos((w - target_energy) * dtau * c.s1)) @ v.conj().T


# ---------------------------------------------------------------------------
# circuit emission
# ---------------------------------------------------------------------------


def _emit_generator_layer(
    circ: CircuitIR,
    terms: list[tuple[float, int, int]],
    time: float,
    tag: str,
):
    """exp(-i * time * sum c P), one rotation op per term, listing order."""
    for c, x, z in terms:
        theta = 2.0 * c * time
        wires = tuple(q for q in range(circ.n_wires) if ((x | z) >> q) & 1)
        letters = "".join(
            mask_to_string(x, z, circ.n_wires)[circ.n_wires - 1 - q] for q in wires
        )
        circ.rot(letters, wires, theta, tag=tag)


def crte_blocks(gen: CrteGenerator, t: float, r: int) -> list[tuple[str, CircuitIR]]:
    """Labeled sub-circuits of the product formula, in time order.

    Per slice: ("lambda", t/2r), ("v2", t/r), ("v1", t/r), ("lambda", t/2r);
    within the off-diagonal part the second group acts first. The
    error-detected pipeline inserts a check after each v2 block and each
    slice-closing lambda block.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    lam = gen.lambda1 + gen.lambda2
    half, full = t / (2 * r), t / r
    blocks: list[tuple[str, CircuitIR]] = []

    def block(name: str, terms, time: float):
        c = CircuitIR(gen.n_qubits)
        _emit_generator_layer(c, terms, time, name)
        blocks.append((name, c))

    for _ in range(r):
        block("lambda", lam, half)
        block("v2", gen.v2, full)
        block("v1", gen.v1, full)
        block("lambda", lam, half)
    return blocks


def crte_circuit(gen: CrteGenerator, t: float, r: int, n_wires: int | None = None) -> CircuitIR:
    """Second-order product formula for exp(-i t (Lambda + V)).

    Per slice, in time order: Lambda at t/2r, V1 and V2 at t/r (first order
    within the off-diagonal part), Lambda at t/2r again.
    """
    circ = CircuitIR(n_wires or gen.n_qubits)
    for _, block in crte_blocks(gen, t, r):
        circ.extend(block)
    return circ


def ancilla_u1(circ: CircuitIR, anc: int):
    circ.rot("X", (anc,), -math.pi / 2, tag="u1")


def ancilla_u2(circ: CircuitIR, anc: int, consts: PiteConstants):
    circ.pauli("Z", (anc,), tag="u2")
    circ.rot("Z", (anc,), math.pi / 2 - 2 * consts.theta0, tag="u2")
    circ.rot("X", (anc,), -math.pi / 2, tag="u2")


def step_blocks(
    gen: CrteGenerator,
    consts: PiteConstants,
    dtau: float,
    r: int,
    shift: float | None = None,
) -> list[tuple[str, CircuitIR]]:
    """Labeled blocks of one step: u1, the evolution blocks, u2."""
    g = gen if shift is None else gen.with_shift(effective_shift(consts, dtau, shift))
    u1 = CircuitIR(gen.n_qubits)
    ancilla_u1(u1, gen.ancilla_index)
    u2 = CircuitIR(gen.n_qubits)
    ancilla_u2(u2, gen.ancilla_index, consts)
    return [("u1", u1)] + crte_blocks(g, dtau * consts.s1, r) + [("u2", u2)]


def pite_step_circuit(
    gen: CrteGenerator,
    consts: PiteConstants,
    dtau: float,
    r: int,
    shift: float | None = None,
) -> CircuitIR:
    """One unmeasured step: U1, conditioned evolution, U2.

    `shift` is the target energy; None runs the bare sin filter. Measuring
    the ancilla (wire `gen.ancilla_index`) in 0 afterwards applies the
    success branch.
    """
    circ = CircuitIR(gen.n_qubits)
    for _, block in step_blocks(gen, consts, dtau, r, shift):
        circ.extend(block)
    return circ


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PiteSchedule:
    """Per-step imaginary-time sizes, Trotter divisions, and shift target."""

    dtau: tuple[float, ...]
    r: tuple[int, ...]
    energy_shift: float
    m0: float

    def __post_init__(self):
        if len(self.dtau) != len(self.r):
            raise ValueError("dtau and r must have equal length")
        if any(d <= 0 for d in self.dtau) or any(k < 1 for k in self.r):
            raise ValueError("dtau must be positive and r at least 1")

    @property
    def n_steps(self) -> int:
        return len(self.dtau)


GROUND_DTAU_START = 0.25
EXCITED_DTAU_START = 0.05
MIN_TARGET_GAP = 1e-6


def make_schedule(kind: str, energies, n_steps: int, m0: float) -> PiteSchedule:
    """Linear ramp ending at the first zero of the neighbour-state filter.

    `energies` are the run-relevant ascending levels: index 0 is the ground
    run's target, index 1 the excited run's target and the ground ramp's
    reference gap partner, index 2 the excited ramp's.
    """
    e = [float(v) for v in energies]
    if len(e) < 3:
        raise ValueError("need at least 3 levels")
    c = pite_constants(m0)
    if kind == "ground":
        gap = e[1] - e[0]
        start, shift = GROUND_DTAU_START, e[0]
        r = tuple(k + 1 for k in range(n_steps))
    elif kind == "excited":
        gap = e[2] - e[1]
        start, shift = EXCITED_DTAU_START, e[1]
        r = tuple(max(1, k) for k in range(n_steps))
    else:
        raise ValueError(f"unknown schedule kind {kind!r}")
    if gap < MIN_TARGET_GAP:
        raise ValueError("target gap is degenerate; no meaningful ramp endpoint")
    stop = math.pi / (2 * c.s1 * gap)
    if n_steps == 1:
        dtau = (stop,)
    else:
        dtau = tuple(np.linspace(start, stop, n_steps))
    return PiteSchedule(dtau=dtau, r=r, energy_shift=shift, m0=m0)
