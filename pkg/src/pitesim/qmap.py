"""Fermion-to-qubit mapping, truncation, symmetry tapering, generator split.

Spin-orbital mode order: all spin-up orbitals ascending, then all spin-down
(mode i = orbital i up, mode n_orb+i = orbital i down). The parity encoding
stores cumulative occupation parities, so qubit n_orb-1 carries the spin-up
particle parity and qubit 2n_orb-1 the total parity; both are conserved and
are removed after fixing the sector, leaving 2n_orb-2 qubits.

Qubit 0 is the rightmost letter of a printed string everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .effham import SecondQuantizedHamiltonian, KS
from .pauli import PauliSum, mask_to_string, masks_commute, mul_masks, string_to_mask


# ---------------------------------------------------------------------------
# parity-encoded ladder operators
# ---------------------------------------------------------------------------


def _ladder_op(mode: int, n_modes: int, dagger: bool) -> PauliSum:
    """Creation/annihilation operator in the cumulative-parity encoding.

    a+_j = (1/2) X_{n-1}..X_{j+1} (X_j Z_{j-1} -+ i Y_j), lower sign for a_j.
    """
    update = 0
    for k in range(mode + 1, n_modes):
        update |= 1 << k
    out = PauliSum(n_modes)
    # X_j Z_{j-1} part
    x1 = update | (1 << mode)
    z1 = (1 << (mode - 1)) if mode > 0 else 0
    out.add(0.5, x1, z1)
    # -+ i Y_j part
    sign = -1j if dagger else 1j
    out.add(0.5 * sign, update | (1 << mode), 1 << mode)
    return out


def _number_op(mode: int, n_modes: int) -> PauliSum:
    """n_j = (I - Z_j Z_{j-1}) / 2 in the parity encoding."""
    out = PauliSum(n_modes)
    out.add(0.5, 0, 0)
    z = 1 << mode
    if mode > 0:
        z |= 1 << (mode - 1)
    out.add(-0.5, 0, z)
    return out


# ---------------------------------------------------------------------------
# mapping bookkeeping
# ---------------------------------------------------------------------------


@dataclass
class QubitMapping:
    """Index bookkeeping from determinants to (reduced, tapered) qubits."""

    n_orb: int
    parity_up: int  # fixed value of removed up-parity bit
    parity_total: int  # fixed value of removed total-parity bit
    taper_support: tuple[int, ...] = ()  # reduced-register qubits of the symmetry
    taper_qubit: int = -1  # reduced-register qubit removed by tapering
    taper_sign: int = 0  # eigenvalue of the kept sector

    @property
    def n_modes(self) -> int:
        return 2 * self.n_orb

    @property
    def kept_parity_bits(self) -> list[int]:
        drop = {self.n_orb - 1, 2 * self.n_orb - 1}
        return [m for m in range(self.n_modes) if m not in drop]

    def det_to_parity_bits(self, det: int) -> list[int]:
        bits = []
        acc = 0
        for m in range(self.n_modes):
            acc ^= (det >> m) & 1
            bits.append(acc)
        return bits

    def det_to_reduced_index(self, det: int) -> int:
        """Determinant -> basis index on the 2n_orb-2 reduced register."""
        p = self.det_to_parity_bits(det)
        if p[self.n_orb - 1] != self.parity_up or p[-1] != self.parity_total:
            raise ValueError(
                f"determinant {det:0{self.n_modes}b} lies outside the fixed parity sector"
            )
        idx = 0
        for q, m in enumerate(self.kept_parity_bits):
            idx |= p[m] << q
        return idx

    def reduced_index_to_det(self, idx: int) -> int:
        p = [0] * self.n_modes
        for q, m in enumerate(self.kept_parity_bits):
            p[m] = (idx >> q) & 1
        p[self.n_orb - 1] = self.parity_up
        p[-1] = self.parity_total
        det = 0
        prev = 0
        for m in range(self.n_modes):
            det |= (p[m] ^ prev) << m
            prev = p[m]
        return det

    # -- taper-level encoding (drop one more qubit) --------------------

    def _check_tapered(self):
        if self.taper_qubit < 0:
            raise ValueError("mapping has no taper step")

    def det_to_tapered_index(self, det: int) -> tuple[int, int]:
        """Returns (basis index, amplitude sign) on the tapered register.

        The sign is -1 for minus-sector states whose dropped bit is 0 (the
        tapering Clifford maps them onto -|minus> on the removed wire).
        """
        self._check_tapered()
        idx = self.det_to_reduced_index(det)
        par = sum((idx >> q) & 1 for q in self.taper_support) % 2
        if (1 if par == 0 else -1) != self.taper_sign:
            raise ValueError("determinant lies outside the tapered symmetry sector")
        sign = 1
        if self.taper_sign == -1 and not (idx >> self.taper_qubit) & 1:
            sign = -1
        return _drop_bit_index(idx, self.taper_qubit), sign

    def tapered_index_to_det(self, idx: int) -> int:
        self._check_tapered()
        partial = _insert_bit_index(idx, self.taper_qubit, 0)
        par = sum((partial >> q) & 1 for q in self.taper_support if q != self.taper_qubit) % 2
        want = 0 if self.taper_sign == 1 else 1
        bit = par ^ want
        full = _insert_bit_index(idx, self.taper_qubit, bit)
        return self.reduced_index_to_det(full)


def _drop_bit_index(idx: int, bit: int) -> int:
    low = idx & ((1 << bit) - 1)
    high = idx >> (bit + 1)
    return low | (high << bit)


def _insert_bit_index(idx: int, bit: int, value: int) -> int:
    low = idx & ((1 << bit) - 1)
    high = idx >> bit
    return low | (value << bit) | (high << (bit + 1))


def _drop_qubit_masks(x: int, z: int, bit: int) -> tuple[int, int]:
    return _drop_bit_index(x, bit), _drop_bit_index(z, bit)


# ---------------------------------------------------------------------------
# parity map
# ---------------------------------------------------------------------------


def parity_map(
    h: SecondQuantizedHamiltonian, n_electrons: int, sz: float
) -> tuple[PauliSum, QubitMapping]:
    """Map the orbital Hamiltonian onto 2 n_orb - 2 qubits.

    The (N, Sz) sector fixes the two conserved parity qubits, which are
    replaced by their eigenvalues and removed.
    """
    if h.basis != KS:
        raise ValueError("parity mapping expects the one-body-diagonal basis")
    n = h.n_orb
    n_modes = 2 * n
    n_up = round(n_electrons / 2 + sz)
    n_dn = n_electrons - n_up
    if not (0 <= n_up <= n and 0 <= n_dn <= n):
        raise ValueError(f"invalid sector N={n_electrons}, Sz={sz}")

    full = PauliSum(n_modes)
    eps = np.diag(h.one_body)
    for i in range(n):
        if abs(eps[i]) > 1e-14:
            for s in (0, n):
                for t in _number_op(i + s, n_modes):
                    full.add(t.coeff * eps[i], t.x, t.z)

    create = {m: _ladder_op(m, n_modes, True) for m in range(n_modes)}
    destroy = {m: _ladder_op(m, n_modes, False) for m in range(n_modes)}
    two_nz = np.argwhere(np.abs(h.two_body) > 1e-14)
    for i, j, k, l in two_nz:
        c = 0.5 * h.two_body[i, j, k, l]
        for s in (0, n):
            for r in (0, n):
                op = (
                    create[i + s]
                    .matmul(create[j + r])
                    .matmul(destroy[l + r])
                    .matmul(destroy[k + s])
                )
                for t_key, t_c in op.items():
                    full.add(c * t_c, *t_key)

    # fix and remove the two parity qubits
    up_bit, tot_bit = n - 1, n_modes - 1
    up_val = 1 if n_up % 2 == 0 else -1
    tot_val = 1 if n_electrons % 2 == 0 else -1
    reduced = PauliSum(n_modes - 2)
    for (x, z), c in full.items():
        if (x >> up_bit) & 1 or (x >> tot_bit) & 1:
            raise RuntimeError("parity qubit acquired off-diagonal support")
        sign = 1
        if (z >> up_bit) & 1:
            sign *= up_val
        if (z >> tot_bit) & 1:
            sign *= tot_val
        x2, z2 = _drop_qubit_masks(x, z, tot_bit)
        x2, z2 = _drop_qubit_masks(x2, z2, up_bit)
        reduced.add(sign * c, x2, z2)

    mapping = QubitMapping(
        n_orb=n,
        parity_up=0 if n_up % 2 == 0 else 1,
        parity_total=0 if n_electrons % 2 == 0 else 1,
    )
    return reduced, mapping


# ---------------------------------------------------------------------------
# truncation and Z2 symmetries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncationReport:
    removed_terms: int
    removed_weight: float  # sum of |coeff| dropped


def truncate(p: PauliSum, threshold: float) -> tuple[PauliSum, TruncationReport]:
    """Drop terms with |coeff| < threshold."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    out = PauliSum(p.n_qubits)
    removed = 0
    weight = 0.0
    for (x, z), c in p.items():
        if abs(c) < threshold:
            removed += 1
            weight += abs(c)
        else:
            out.add(c, x, z)
    return out, TruncationReport(removed, weight)


def find_z2_symmetries(p: PauliSum) -> list[str]:
    """All nontrivial I/Z strings commuting with every term."""
    n = p.n_qubits
    out = []
    for zmask in range(1, 2**n):
        if all(masks_commute(0, zmask, x, z) for ((x, z), _c) in p.items()):
            out.append(mask_to_string(0, zmask, n))
    return out


def taper(
    p: PauliSum, sym: str, sector_sign: int, target_qubit: int | None = None
) -> PauliSum:
    """Remove one qubit by fixing the eigensector of a Z-type symmetry.

    Conjugates by (X_t + S)/sqrt(2), after which every term carries I or X
    on the target qubit; X is replaced by sector_sign and the qubit dropped.
    """
    sx, sz = string_to_mask(sym)
    if sx != 0 or sz == 0:
        raise ValueError("symmetry must be a nontrivial Z-type string")
    if sector_sign not in (+1, -1):
        raise ValueError("sector_sign must be +1 or -1")
    # dropping the lowest support qubit reproduces the fixed generator template
    support = [q for q in range(p.n_qubits) if (sz >> q) & 1]
    t = support[0] if target_qubit is None else target_qubit
    if not (sz >> t) & 1:
        raise ValueError("target qubit must be in the symmetry support")
    xt = 1 << t

    out = PauliSum(p.n_qubits - 1)
    for (x, z), c in p.items():
        if not masks_commute(x, z, 0, sz):
            raise ValueError(f"term {mask_to_string(x, z, p.n_qubits)} breaks the symmetry")
        if masks_commute(x, z, xt, 0):
            x2, z2, ph = x, z, 1.0
        else:
            # U P U = -P X_t S for P anticommuting with X_t
            xa, za, ph1 = mul_masks(x, z, xt, 0)
            x2, z2, ph2 = mul_masks(xa, za, 0, sz)
            ph = -ph1 * ph2
        sign = sector_sign if (x2 >> t) & 1 else 1
        xd, zd = _drop_qubit_masks(x2, z2, t)
        out.add(c * ph * sign, xd, zd)
    return out


# ---------------------------------------------------------------------------
# real-time-generator grouping
# ---------------------------------------------------------------------------

# Fixed split of the conditioned-evolution generator into two diagonal and
# two off-diagonal gate groups (system letters only; the conditioning Z on
# the extra wire is implicit). Strings absent after truncation are skipped.
LAMBDA1_TEMPLATE = ("IIZ", "IZI", "ZIZ")
LAMBDA2_TEMPLATE = ("ZZI", "ZII", "IZZ", "ZZZ")
V1_TEMPLATE = (
    "XXX", "ZZX", "ZXZ", "XZZ", "IXX", "ZXX", "XZX", "XIX",
    "XXZ", "XXI", "IIX", "IXI", "XII", "IXZ", "ZXI",
)
V2_TEMPLATE = (
    "YYX", "YXY", "XYY", "IZX", "YZY", "YIY", "YYZ", "YYI",
    "ZIX", "XIZ", "XZI",
)


@dataclass
class CrteGenerator:
    """H (x) Z split into diagonal (lambda) and off-diagonal (V) groups.

    Each group lists (coeff, x, z) terms on n_system + 1 qubits with the
    conditioning wire at index `ancilla_index` (always Z there).
    """

    n_qubits: int
    ancilla_index: int
    lambda1: list[tuple[float, int, int]] = field(default_factory=list)
    lambda2: list[tuple[float, int, int]] = field(default_factory=list)
    v1: list[tuple[float, int, int]] = field(default_factory=list)
    v2: list[tuple[float, int, int]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def groups(self) -> dict[str, list[tuple[float, int, int]]]:
        return {
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "v1": self.v1,
            "v2": self.v2,
        }

    def flattened(self) -> PauliSum:
        out = PauliSum(self.n_qubits)
        for terms in self.groups().values():
            for c, x, z in terms:
                out.add(c, x, z)
        return out

    def with_shift(self, shift: float) -> "CrteGenerator":
        """Add (-shift) times the conditioning-wire Z, merging with any
        existing ancilla-only term so the layer gate count is unchanged."""
        out = CrteGenerator(
            self.n_qubits,
            self.ancilla_index,
            list(self.lambda1),
            list(self.lambda2),
            list(self.v1),
            list(self.v2),
            list(self.warnings),
        )
        if shift == 0.0:
            return out
        key = (0, 1 << self.ancilla_index)
        for group in (out.lambda1, out.lambda2):
            for i, (c, x, z) in enumerate(group):
                if (x, z) == key:
                    group[i] = (c - shift, x, z)
                    return out
        out.lambda1 = [(-shift, *key)] + out.lambda1
        return out


def build_crte_generator(p: PauliSum, warn: bool = True) -> CrteGenerator:
    """Append the conditioning Z and split terms by the fixed template."""
    n_sys = p.n_qubits
    gen = CrteGenerator(n_qubits=n_sys + 1, ancilla_index=0)
    lam1 = {string_to_mask(s) for s in LAMBDA1_TEMPLATE}
    lam2 = {string_to_mask(s) for s in LAMBDA2_TEMPLATE}
    v1 = {string_to_mask(s) for s in V1_TEMPLATE}
    v2 = {string_to_mask(s) for s in V2_TEMPLATE}
    for (x, z), c in sorted(p.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        cx, cz = x << 1, (z << 1) | 1  # tensor Z on wire 0
        entry = (float(np.real(c)), cx, cz)
        key = (x, z)
        if key in lam1:
            gen.lambda1.append(entry)
        elif key in lam2 or (x == 0 and z == 0):
            gen.lambda2.append(entry)  # constant offset rides with the diagonals
        elif key in v1:
            gen.v1.append(entry)
        elif x == 0:
            gen.lambda2.append(entry)
        else:
            if key not in v2:
                msg = f"string {mask_to_string(x, z, n_sys)} outside the fixed template, placed in V2"
                gen.warnings.append(msg)
                if warn:
                    import warnings as _w

                    _w.warn(msg)
            gen.v2.append(entry)
    return gen


# ---------------------------------------------------------------------------
# determinant encoding through the full pipeline
# ---------------------------------------------------------------------------


def encode_determinant_state(
    coeffs: dict[int, float] | dict[int, complex],
    mapping: QubitMapping,
) -> np.ndarray:
    """Amplitudes over determinants -> statevector on the tapered register."""
    n_q = 2 * mapping.n_orb - 2 - 1
    vec = np.zeros(2**n_q, dtype=complex)
    for det, c in coeffs.items():
        idx, sign = mapping.det_to_tapered_index(det)
        vec[idx] += sign * c
    nrm = np.linalg.norm(vec)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"input state not normalized (norm {nrm:.3e})")
    return vec


def decode_tapered_index(idx: int, mapping: QubitMapping) -> int:
    """Tapered computational basis index -> determinant bitmask."""
    return mapping.tapered_index_to_det(idx)
