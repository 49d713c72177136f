"""Few-orbital interacting Hamiltonians and their exact diagonalization.

The model is a small multi-orbital Hamiltonian with hopping t, screened
density-density interaction U and exchange/pair-transfer interaction J,

    H = sum_s sum_ij t[i,j] a+_is a_js
      + 1/2 sum_sr sum_ij ( U[i,j] a+_is a+_jr a_jr a_is
                          + J[i,j] (a+_is a+_jr a_ir a_js + a+_is a+_ir a_jr a_js) )

with J active only for i != j. Everything is in eV. Spin orbitals are
ordered with the spin-up block in the low bits (mode i = orbital i up,
mode n_orb + i = orbital i down), determinants are occupation bitmasks
over those modes, ascending-int ordered within a sector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import curve_fit

SYM_TOL = 1e-12
HERM_TOL = 1e-10
DEGENERACY_GAP = 1e-8
TOL_DEG = 5e-3  # multiplet grouping; keeps 0.01 eV physical splits apart

WANNIER = "wannier"
KS = "ks"


# ---------------------------------------------------------------------------
# parameter tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitalModelParams:
    """Tabulated (t, U, J) matrices for one system, in eV."""

    n_orb: int
    t: np.ndarray
    U: np.ndarray
    J: np.ndarray
    label: str = ""

    def __post_init__(self):
        for name in ("t", "U", "J"):
            m = getattr(self, name)
            if m.shape != (self.n_orb, self.n_orb):
                raise ValueError(f"{name} must be {self.n_orb}x{self.n_orb}")
            if np.max(np.abs(m - m.T)) > SYM_TOL:
                raise ValueError(f"{name} is not symmetric")
        if np.any(np.diag(self.U) <= 0):
            raise ValueError("on-site U must be positive")
        off = self.J[~np.eye(self.n_orb, dtype=bool)]
        if np.any(off < 0):
            raise ValueError("exchange J must be non-negative")

    @classmethod
    def from_text(cls, text: str, label: str = "") -> "OrbitalModelParams":
        """Parse the plain-text table format.

        First non-comment line: n_orb. Then one line per pair:
        ``i j t U J`` (1-based indices, J ignored on the diagonal).
        """
        lines = [
            ln.split("#", 1)[0].strip()
            for ln in text.splitlines()
        ]
        lines = [ln for ln in lines if ln]
        n_orb = int(lines[0])
        t = np.zeros((n_orb, n_orb))
        U = np.zeros((n_orb, n_orb))
        J = np.zeros((n_orb, n_orb))
        for ln in lines[1:]:
            parts = ln.split()
            i, j = int(parts[0]) - 1, int(parts[1]) - 1
            tv, uv = float(parts[2]), float(parts[3])
            jv = float(parts[4]) if len(parts) > 4 else 0.0
            t[i, j] = t[j, i] = tv
            U[i, j] = U[j, i] = uv
            if i != j:
                J[i, j] = J[j, i] = jv
        return cls(n_orb=n_orb, t=t, U=U, J=J, label=label)


# ---------------------------------------------------------------------------
# second-quantized form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SecondQuantizedHamiltonian:
    """One- plus two-body Hamiltonian over n_orb spatial orbitals.

    two_body[i,j,k,l] multiplies  1/2 sum_sr a+_is a+_jr a_lr a_ks  and has
    the eightfold index symmetry of real orbitals. basis_rotation holds the
    orthogonal matrix relating the current orbitals to the original ones
    (identity before any rotation).
    """

    basis: str
    one_body: np.ndarray
    two_body: np.ndarray
    basis_rotation: np.ndarray
    label: str = ""

    def __post_init__(self):
        n = self.n_orb
        if np.max(np.abs(self.one_body - self.one_body.T.conj())) > HERM_TOL:
            raise ValueError("one_body is not Hermitian")
        v = self.two_body
        for perm in ((2, 1, 0, 3), (0, 3, 2, 1), (1, 0, 3, 2)):
            if np.max(np.abs(v - v.transpose(perm))) > HERM_TOL:
                raise ValueError("two_body lacks real-orbital index symmetry")
        if self.basis == KS:
            off = self.one_body - np.diag(np.diag(self.one_body))
            if np.max(np.abs(off)) > HERM_TOL:
                raise ValueError("KS one_body must be diagonal")

    @property
    def n_orb(self) -> int:
        return self.one_body.shape[0]


def build_wannier_hamiltonian(params: OrbitalModelParams) -> SecondQuantizedHamiltonian:
    """Assemble the two-body tensor from the (t, U, J) tables."""
    n = params.n_orb
    v = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            v[i, j, i, j] += params.U[i, j]
            if i != j:
                v[i, j, j, i] += params.J[i, j]
                v[i, i, j, j] += params.J[i, j]
    return SecondQuantizedHamiltonian(
        basis=WANNIER,
        one_body=params.t.copy(),
        two_body=v,
        basis_rotation=np.eye(n),
        label=params.label,
    )


def _deterministic_eigenbasis(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues with a reproducible gauge in degenerate blocks.

    Within each numerically degenerate block the canonical axes are
    Gram-Schmidt projected into the eigenspace, then every vector's sign is
    fixed so its largest-magnitude component is positive.
    """
    w, vecs = np.linalg.eigh(mat)
    n = len(w)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[stop - 1] < DEGENERACY_GAP:
            stop += 1
        if stop - start > 1:
            block = vecs[:, start:stop]
            proj = block @ block.T.conj()
            basis = []
            for axis in range(n):
                cand = proj @ np.eye(n)[:, axis]
                for b in basis:
                    cand = cand - b * (b.conj() @ cand)
                nrm = np.linalg.norm(cand)
                if nrm > 1e-6:
                    basis.append(cand / nrm)
                if len(basis) == stop - start:
                    break
            vecs[:, start:stop] = np.column_stack(basis)
        start = stop
    for k in range(n):
        col = vecs[:, k]
        if col[np.argmax(np.abs(col))] < 0:
            vecs[:, k] = -col
    return w, vecs


def to_ks_basis(h: SecondQuantizedHamiltonian) -> SecondQuantizedHamiltonian:
    """Rotate to the basis diagonalizing the one-body part."""
    if h.basis != WANNIER:
        raise ValueError("input must be in the Wannier basis")
    if np.max(np.abs(h.one_body - np.diag(np.diag(h.one_body)))) <= HERM_TOL:
        return SecondQuantizedHamiltonian(
            basis=KS,
            one_body=h.one_body.copy(),
            two_body=h.two_body.copy(),
            basis_rotation=np.eye(h.n_orb),
            label=h.label,
        )
    eps, u = _deterministic_eigenbasis(h.one_body)
    v = np.einsum("ai,bj,abcd,ck,dl->ijkl", u, u, h.two_body, u, u, optimize=True)
    return SecondQuantizedHamiltonian(
        basis=KS,
        one_body=np.diag(eps),
        two_body=v,
        basis_rotation=u,
        label=h.label,
    )


# ---------------------------------------------------------------------------
# determinant-basis exact diagonalization
# ---------------------------------------------------------------------------


def sector_determinants(n_orb: int, n_electrons: int, sz: float) -> list[int]:
    """Occupation bitmasks of the fixed (N, Sz) sector, ascending."""
    n_up = round(n_electrons / 2 + sz)
    n_dn = n_electrons - n_up
    if not (0 <= n_up <= n_orb and 0 <= n_dn <= n_orb):
        return []
    dets = []
    for up in combinations(range(n_orb), n_up):
        up_mask = sum(1 << i for i in up)
        for dn in combinations(range(n_orb), n_dn):
            dn_mask = sum(1 << (n_orb + i) for i in dn)
            dets.append(up_mask | dn_mask)
    return sorted(dets)


def _apply_annihilate(det: int, mode: int) -> tuple[int, int]:
    if not (det >> mode) & 1:
        return -1, 0
    sign = -1 if bin(det & ((1 << mode) - 1)).count("1") % 2 else 1
    return det ^ (1 << mode), sign


def _apply_create(det: int, mode: int) -> tuple[int, int]:
    if (det >> mode) & 1:
        return -1, 0
    sign = -1 if bin(det & ((1 << mode) - 1)).count("1") % 2 else 1
    return det | (1 << mode), sign


def apply_op_string(det: int, modes_dagger: list[tuple[int, bool]]) -> tuple[int, int]:
    """Apply a normal product of creations/annihilations, rightmost first.

    modes_dagger lists (mode, is_creation) in operator order (leftmost
    first). Returns (det', sign) or (-1, 0) when annihilated.
    """
    sign = 1
    for mode, dag in reversed(modes_dagger):
        det, s = (_apply_create if dag else _apply_annihilate)(det, mode)
        if det < 0:
            return -1, 0
        sign *= s
    return det, sign


def build_sector_matrix(h: SecondQuantizedHamiltonian, dets: list[int]) -> np.ndarray:
    """Dense Hamiltonian in the given determinant basis."""
    n = h.n_orb
    index = {d: a for a, d in enumerate(dets)}
    dim = len(dets)
    mat = np.zeros((dim, dim))
    spins = (0, n)  # mode offset per spin
    one_nz = [(i, j) for i in range(n) for j in range(n) if abs(h.one_body[i, j]) > 1e-14]
    two_nz = np.argwhere(np.abs(h.two_body) > 1e-14)
    for col, det in enumerate(dets):
        for i, j in one_nz:
            for s in spins:
                out, sign = apply_op_string(det, [(i + s, True), (j + s, False)])
                if out >= 0 and out in index:
                    mat[index[out], col] += sign * h.one_body[i, j]
        for i, j, k, l in two_nz:
            vij = 0.5 * h.two_body[i, j, k, l]
            for s in spins:
                for r in spins:
                    out, sign = apply_op_string(
                        det,
                        [(i + s, True), (j + r, True), (l + r, False), (k + s, False)],
                    )
                    if out >= 0 and out in index:
                        mat[index[out], col] += sign * vij
    return mat


def s2_matrix(n_orb: int, dets: list[int]) -> np.ndarray:
    """Total-spin S^2 in the determinant basis (S^2 = S-S+ + Sz(Sz+1))."""
    index = {d: a for a, d in enumerate(dets)}
    dim = len(dets)
    mat = np.zeros((dim, dim))
    for col, det in enumerate(dets):
        n_up = bin(det & ((1 << n_orb) - 1)).count("1")
        n_dn = bin(det >> n_orb).count("1")
        sz = 0.5 * (n_up - n_dn)
        mat[col, col] += sz * (sz + 1.0)
        # S-S+ = sum_ij a+_i_dn a_i_up a+_j_up a_j_dn
        for i in range(n_orb):
            for j in range(n_orb):
                out, sign = apply_op_string(
                    det,
                    [(n_orb + i, True), (i, False), (j, True), (n_orb + j, False)],
                )
                if out >= 0 and out in index:
                    mat[index[out], col] += sign
    return mat


@dataclass
class FciResult:
    """Exact spectrum of one or more (N, Sz) sectors."""

    sector: tuple[int, float | None]
    energies: np.ndarray
    eigenvectors: np.ndarray  # columns over `determinants`
    determinants: list[int]
    s2_values: np.ndarray
    sz_values: np.ndarray
    degeneracy_groups: list[list[int]] = field(default_factory=list)

    def group_energies(self) -> list[float]:
        return [float(self.energies[g[0]]) for g in self.degeneracy_groups]


def _group_degenerate(energies: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for idx, e in enumerate(energies):
        if groups and e - energies[groups[-1][-1]] < tol:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return groups


def fci_diagonalize(
    h: SecondQuantizedHamiltonian,
    n_electrons: int,
    sz: float | None = None,
    tol_deg: float = TOL_DEG,
) -> FciResult:
    """Dense diagonalization of a fixed-N sector.

    With sz=None all Sz sectors of the particle number are merged, which is
    what multiplet labeling needs.
    """
    if not 0 <= n_electrons <= 2 * h.n_orb:
        raise ValueError("electron count out of range")
    sz_list = (
        [sz]
        if sz is not None
        else [s / 2 for s in range(-n_electrons, n_electrons + 1, 2)]
    )
    dets: list[int] = []
    det_sz: list[float] = []
    for s in sz_list:
        block = sector_determinants(h.n_orb, n_electrons, s)
        dets.extend(block)
        det_sz.extend([s] * len(block))
    if not dets:
        raise ValueError(f"empty sector N={n_electrons}, Sz={sz}")
    order = np.argsort(dets)
    dets = [dets[i] for i in order]
    det_sz_arr = np.array([det_sz[i] for i in order])

    mat = build_sector_matrix(h, dets)
    energies, vecs = np.linalg.eigh(mat)

    s2 = s2_matrix(h.n_orb, dets)
    s2_vals = np.einsum("ia,ij,ja->a", vecs.conj(), s2, vecs).real
    sz_vals = np.einsum("ia,i,ia->a", vecs.conj(), det_sz_arr, vecs).real
    return FciResult(
        sector=(n_electrons, sz),
        energies=energies,
        eigenvectors=vecs,
        determinants=dets,
        s2_values=s2_vals,
        sz_values=sz_vals,
        degeneracy_groups=_group_degenerate(energies, tol_deg),
    )


def determinant_label(
    det: int, n_orb: int, orbital_names: tuple[str, ...] = ("a1", "ex", "ey")
) -> str:
    """Human-readable occupied-spin-orbital label for a determinant."""
    parts = []
    for i in range(n_orb):
        if (det >> i) & 1:
            parts.append(orbital_names[i] + "↑")
    for i in range(n_orb):
        if (det >> (n_orb + i)) & 1:
            parts.append(orbital_names[i] + "↓")
    return "".join(parts) if parts else "vac"


# ---------------------------------------------------------------------------
# multiplet labeling
# ---------------------------------------------------------------------------


class MultipletLabelingError(RuntimeError):
    """Spectrum does not match the expected triplet/singlet ordering."""

    def __init__(self, message: str, raw: FciResult):
        super().__init__(message)
        self.raw = raw


@dataclass(frozen=True)
class ExcitationTable:
    """Labeled multiplet gaps, split near-degenerate pairs kept as pairs."""

    labels: dict[str, tuple[float, ...]]  # multiplet -> absolute energies
    rows: dict[str, tuple[float, ...]]  # transition -> gap(s), eV


def _is_triplet(s2: float) -> bool:
    return abs(s2 - 2.0) < 1e-6


def _is_singlet(s2: float) -> bool:
    return abs(s2) < 1e-6


def excitation_table(res: FciResult, pair_window: float = 0.08) -> ExcitationTable:
    """Label the low-lying multiplets and report their gaps.

    The template is: ground triplet, then a singlet pair, then one more
    singlet, then a triplet pair (possibly split into two nearby groups).
    """
    groups = res.degeneracy_groups
    g_s2 = [float(np.mean(res.s2_values[g])) for g in groups]
    g_e = [float(res.energies[g[0]]) for g in groups]

    def fail(msg: str) -> MultipletLabelingError:
        return MultipletLabelingError(msg, res)

    if not groups or not _is_triplet(g_s2[0]) or len(groups[0]) != 3:
        raise fail("ground group is not a spin triplet")
    e_gs = g_e[0]

    idx = 1
    # singlet doublet, possibly split into two adjacent groups
    low_singlets: list[float] = []
    while idx < len(groups) and _is_singlet(g_s2[idx]) and len(low_singlets) < 2:
        take = len(groups[idx])
        for _ in range(take):
            if len(low_singlets) < 2:
                low_singlets.append(g_e[idx])
        idx += 1
    if len(low_singlets) != 2 or low_singlets[1] - low_singlets[0] > pair_window:
        raise fail("no near-degenerate singlet pair above the ground triplet")
    if idx >= len(groups) or not _is_singlet(g_s2[idx]):
        raise fail("no isolated singlet above the singlet pair")
    e_a1 = g_e[idx]
    idx += 1
    upper_triplets: list[float] = []
    while idx < len(groups) and len(upper_triplets) < 2:
        if not _is_triplet(g_s2[idx]):
            raise fail("expected excited triplets after the singlet")
        for _ in range(len(groups[idx]) // 3):
            if len(upper_triplets) < 2:
                upper_triplets.append(g_e[idx])
        idx += 1
    if len(upper_triplets) != 2 or upper_triplets[1] - upper_triplets[0] > pair_window:
        raise fail("no excited triplet pair found")

    t_gs = (e_gs,)
    e_pair = tuple(low_singlets)
    a1 = (e_a1,)
    t_pair = tuple(upper_triplets)
    labels = {"3A2": t_gs, "1E": e_pair, "1A1": a1, "3E": t_pair}
    rows = {
        "3A2->3E": tuple(t - e_gs for t in t_pair),
        "3A2->1A1": (e_a1 - e_gs,),
        "3A2->1E": tuple(s - e_gs for s in e_pair),
        "1E->1A1": tuple(e_a1 - s for s in e_pair),
        "1A1->3E": tuple(t - e_a1 for t in t_pair),
    }
    return ExcitationTable(labels=labels, rows=rows)


# ---------------------------------------------------------------------------
# exponential-convergence fit
# ---------------------------------------------------------------------------


def fit_extrapolation(points: list[tuple[float, float]]) -> tuple[float, float, float]:
    """Least-squares fit of E(x) = b exp(-x/c) + E_inf; returns (b, c, E_inf)."""
    if len(points) < 3:
        raise ValueError("need at least 3 points")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    if len(set(x.tolist())) != len(x):
        raise ValueError("x values must be distinct")

    spread = float(y.max() - y.min())
    if spread < 1e-12:
        return 0.0, float(np.ptp(x) or 1.0), float(np.mean(y))

    def model(xv, b, c, e_inf):
        return b * np.exp(-xv / c) + e_inf

    scale = float(np.ptp(x)) or 1.0
    best = None
    for c0 in (scale / 4, scale, scale * 4):
        try:
            p0 = (y[0] - y[-1], c0, y[-1])
            popt, _ = curve_fit(model, x, y, p0=p0, maxfev=20000)
            resid = float(np.sum((model(x, *popt) - y) ** 2))
            if best is None or resid < best[1]:
                best = (popt, resid)
        except RuntimeError:
            continue
    if best is None:
        raise RuntimeError("extrapolation fit did not converge")
    popt, resid = best
    if resid > max(1e-6, 1e-4 * spread**2) and len(points) > 3:
        raise RuntimeError(f"extrapolation fit poorly converged, residual {resid:.3e}")
    return float(popt[0]), float(popt[1]), float(popt[2])
