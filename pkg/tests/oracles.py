"""Independent brute-force oracles used by the tests.

These deliberately re-derive physics through a different code path than
the package: explicit fermionic sign bookkeeping over occupation bitmasks,
term-by-term from the interaction definition, with no shared tensor
machinery. Keep them dumb.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def apply_ops(det: int, ops) -> tuple[int | None, int]:
    """ops: (mode, dagger) pairs applied rightmost first."""
    sign = 1
    for mode, dag in reversed(ops):
        occ = (det >> mode) & 1
        if dag == occ:
            return None, 0
        below = bin(det & ((1 << mode) - 1)).count("1")
        sign *= (-1) ** below
        det ^= 1 << mode
    return det, sign


def sector_dets(n_orb: int, n_up: int, n_dn: int) -> list[int]:
    out = []
    for up in combinations(range(n_orb), n_up):
        for dn in combinations(range(n_orb), n_dn):
            out.append(sum(1 << i for i in up) | sum(1 << (n_orb + i) for i in dn))
    return sorted(out)


def brute_matrix(n_orb: int, t, U, J, dets) -> np.ndarray:
    """Hamiltonian matrix assembled directly from the t/U/J definition."""
    t, U, J = np.asarray(t, float), np.asarray(U, float), np.asarray(J, float)
    idx = {d: i for i, d in enumerate(dets)}
    H = np.zeros((len(dets), len(dets)))
    spins = (0, n_orb)
    for col, det in enumerate(dets):
        for i in range(n_orb):
            for j in range(n_orb):
                if t[i, j]:
                    for s in spins:
                        out, sg = apply_ops(det, [(i + s, True), (j + s, False)])
                        if out is not None and out in idx:
                            H[idx[out], col] += sg * t[i, j]
                for s in spins:
                    for r in spins:
                        if U[i, j]:
                            out, sg = apply_ops(
                                det,
                                [(i + s, True), (j + r, True), (j + r, False), (i + s, False)],
                            )
                            if out is not None and out in idx:
                                H[idx[out], col] += 0.5 * sg * U[i, j]
                        if i != j and J[i, j]:
                            out, sg = apply_ops(
                                det,
                                [(i + s, True), (j + r, True), (i + r, False), (j + s, False)],
                            )
                            if out is not None and out in idx:
                                H[idx[out], col] += 0.5 * sg * J[i, j]
                            out, sg = apply_ops(
                                det,
                                [(i + s, True), (i + r, True), (j + r, False), (j + s, False)],
                            )
                            if out is not None and out in idx:
                                H[idx[out], col] += 0.5 * sg * J[i, j]
    return H


def depolarize_2q(rho: np.ndarray, wires: tuple[int, int], n: int, p2: float) -> np.ndarray:
    """Exact uniform two-qubit depolarizing channel on a density matrix."""
    from pitesim.pauli import pauli_matrix

    out = (1.0 - p2) * rho
    letters = "IXYZ"
    for a in range(4):
        for b in range(4):
            if a == b == 0:
                continue
            label = ["I"] * n
            label[n - 1 - wires[0]] = letters[a]
            label[n - 1 - wires[1]] = letters[b]
            P = pauli_matrix("".join(label))
            out += (p2 / 15.0) * (P @ rho @ P.conj().T)
    return out
