"""Real-amplitude state preparation via multiplexed Y rotations.

A length-2^m real unit vector is prepared wire by wire from the top bit
down. Each multiplexer is expanded into commuting Pauli rotations
(Z...ZY strings) through a Walsh transform of its branch angles, so the
output circuit contains only rotation ops and compiles through either
the bare or the encoded backend.
"""

from __future__ import annotations

import math

import numpy as np

from .circuit import CircuitIR


def _signed_norm(block: np.ndarray) -> float:
    if block.size == 1:
        return float(block[0])
    return float(np.linalg.norm(block))


def multiplexer_angles(vec: np.ndarray) -> list[np.ndarray]:
    """Branch angles per level, top wire first.

    Level j holds 2^j angles indexed by the already-prepared high bits.
    Signs enter only at the last level, where subtrees are single
    amplitudes; the reconstruction is exact for any real unit vector.
    """
    v = np.asarray(vec, dtype=float)
    m = int(math.log2(v.size))
    if 1 << m != v.size:
        raise ValueError("length must be a power of two")
    layers = []
    for j in range(m):
        n_prefix = 1 << j
        block = v.reshape(n_prefix, 2, -1)
        thetas = np.empty(n_prefix)
        for p in range(n_prefix):
            a = _signed_norm(block[p, 0].ravel())
            b = _signed_norm(block[p, 1].ravel())
            thetas[p] = 2.0 * math.atan2(b, a)
        layers.append(thetas)
    return layers


def _walsh_coefficients(thetas: np.ndarray) -> np.ndarray:
    """alpha_S with theta_b = sum_S alpha_S (-1)^{|b & S|}."""
    n = thetas.size
    alphas = np.empty(n)
    for s in range(n):
        acc = 0.0
        for b in range(n):
            acc += thetas[b] * (-1) ** ((b & s).bit_count() & 1)
        alphas[s] = acc / n
    return alphas


def real_state_prep(vec: np.ndarray, wires: tuple[int, ...], n_wires: int) -> CircuitIR:
    """Rotation-only circuit preparing `vec` on `wires` from all-zero.

    wires[j] carries bit j of the amplitude index (wires[-1] is the top
    bit and is rotated first).
    """
    v = np.asarray(vec, dtype=float)
    m = len(wires)
    if v.size != 1 << m:
        raise ValueError("vector length does not match wire count")
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("state must be normalized")
    circ = CircuitIR(n_wires)
    layers = multiplexer_angles(v)
    for j, thetas in enumerate(layers):
        target = wires[m - 1 - j]
        controls = [wires[m - 1 - i] for i in range(j)]  # high bits, outer first
        alphas = _walsh_coefficients(thetas)
        for s in range(thetas.size):
            if abs(alphas[s]) < 1e-14:
                continue
            # branch-index bit k lives on controls[j-1-k]
            zw = tuple(controls[j - 1 - k] for k in range(j) if (s >> k) & 1)
            op_wires = zw + (target,)
            circ.rot("Z" * len(zw) + "Y", op_wires, alphas[s], tag="prep")
    return circ
