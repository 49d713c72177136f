import numpy as np
import pytest

from pitesim import effham, qmap
from pitesim.harness import load_params, prepare_system
from pitesim.pauli import PauliSum, pauli_matrix, string_to_mask


def ks_hamiltonian(system="zrv", functional="hse"):
    return effham.to_ks_basis(effham.build_wannier_hamiltonian(load_params(system, functional)))


def sector_spectrum(h, parity_up_even=True, parity_total_even=True):
    """Merged exact spectrum of every (N, Sz) block in the fixed parity class."""
    out = []
    for n_el in range(0, 2 * h.n_orb + 1):
        if (n_el % 2 == 0) != parity_total_even:
            continue
        for sz2 in range(-n_el, n_el + 1, 2):
            n_up = (n_el + sz2) // 2
            n_dn = n_el - n_up
            if not (0 <= n_up <= h.n_orb and 0 <= n_dn <= h.n_orb):
                continue
            if (n_up % 2 == 0) != parity_up_even:
                continue
            out.extend(effham.fci_diagonalize(h, n_el, sz2 / 2).energies.tolist())
    return np.sort(out)


# ---------------------------------------------------------------------------
# parity mapping
# ---------------------------------------------------------------------------


def test_parity_map_spectrum_all_systems():
    for system in ("zrv", "nv", "tiv", "hfv"):
        h = ks_hamiltonian(system)
        psum, _ = qmap.parity_map(h, 4, 0.0)
        assert psum.n_qubits == 4
        w = np.sort(np.linalg.eigvalsh(psum.to_matrix()))
        want = sector_spectrum(h)
        assert np.max(np.abs(w - want)) < 1e-9


def test_parity_map_odd_sector():
    h = ks_hamiltonian("zrv")
    psum, _ = qmap.parity_map(h, 3, 0.5)  # odd N, odd up count
    w = np.sort(np.linalg.eigvalsh(psum.to_matrix()))
    want = sector_spectrum(h, parity_up_even=False, parity_total_even=False)
    assert np.max(np.abs(w - want)) < 1e-9


def test_one_body_only_is_diagonal():
    h = effham.SecondQuantizedHamiltonian(
        basis=effham.KS,
        one_body=np.diag([0.5, 1.5, 2.5]),
        two_body=np.zeros((3, 3, 3, 3)),
        basis_rotation=np.eye(3),
    )
    psum, _ = qmap.parity_map(h, 4, 0.0)
    assert psum.is_diagonal()


def test_identity_one_body_counts_particles():
    c = 0.7
    h = effham.SecondQuantizedHamiltonian(
        basis=effham.KS,
        one_body=c * np.eye(3),
        two_body=np.zeros((3, 3, 3, 3)),
        basis_rotation=np.eye(3),
    )
    psum, mapping = qmap.parity_map(h, 4, 0.0)
    w = np.linalg.eigvalsh(psum.to_matrix())
    # eigenvalues are c*N over the parity class {0, 2, 4, 6} minus excluded blocks
    for val in w:
        assert min(abs(val - c * n) for n in range(7)) < 1e-10
    det = 0b011011
    idx = mapping.det_to_reduced_index(det)
    assert mapping.reduced_index_to_det(idx) == det


def test_invalid_sector_rejected():
    with pytest.raises(ValueError):
        qmap.parity_map(ks_hamiltonian(), 9, 0.5)


# ---------------------------------------------------------------------------
# truncation
# ---------------------------------------------------------------------------


def test_truncate_zero_threshold_is_identity():
    psum, _ = qmap.parity_map(ks_hamiltonian(), 4, 0.0)
    out, rep = qmap.truncate(psum, 0.0)
    assert out.strings() == psum.strings()
    assert rep.removed_terms == 0


def test_truncated_sum_commutes_with_zizi():
    psum, _ = qmap.parity_map(ks_hamiltonian(), 4, 0.0)
    trunc, rep = qmap.truncate(psum, 0.01)
    assert rep.removed_terms > 0
    x, z = string_to_mask("ZIZI")
    assert trunc.commutes_with_mask(x, z)
    # dense commutator check
    m = trunc.to_matrix()
    s = pauli_matrix("ZIZI")
    assert np.max(np.abs(m @ s - s @ m)) < 1e-12


@pytest.mark.xfail(
    reason="the published 0.64 -> 0.70 singlet shift under the 0.07 eV cut is a "
    "gauge artifact: in the deterministic (and in the symmetry-adapted) gauge "
    "the mapped operator has no coefficients below 0.07, so the cut removes "
    "nothing; only arbitrary rotations of the degenerate e pair scatter weight "
    "under the threshold, and no principled gauge reproduces 0.70",
    strict=True,
)
def test_nv_truncation_shifts_low_singlet():
    # the large threshold should move the first singlet gap from 0.64 to ~0.70
    h = ks_hamiltonian("nv")
    fci = effham.fci_diagonalize(h, 4, 0.0)
    gap_before = fci.energies[1] - fci.energies[0]
    assert gap_before == pytest.approx(0.64, abs=0.02)

    psum, _ = qmap.parity_map(h, 4, 0.0)
    trunc, _ = qmap.truncate(psum, 0.07)
    syms = qmap.find_z2_symmetries(trunc)
    sym = "ZIZI" if "ZIZI" in syms else syms[0]
    w_all = []
    for sign in (+1, -1):
        w_all.extend(np.linalg.eigvalsh(qmap.taper(trunc, sym, sign).to_matrix()).tolist())
    w_all = np.sort(w_all)
    fci0 = fci.energies[0]
    near_gs = w_all[np.argmin(np.abs(w_all - fci0))]
    singlet = w_all[np.argmin(np.abs(w_all - (fci0 + 0.70)))]
    assert singlet - near_gs == pytest.approx(0.70, abs=0.01)


def test_nv_truncation_in_this_gauge_is_inert():
    # what actually happens here: every coefficient of the NV mapped operator
    # sits above the 0.07 eV cut, so truncation is the identity
    h = ks_hamiltonian("nv")
    psum, _ = qmap.parity_map(h, 4, 0.0)
    trunc, rep = qmap.truncate(psum, 0.07)
    assert rep.removed_terms == 0
    assert min(abs(t.coeff) for t in psum.terms) > 0.07


# ---------------------------------------------------------------------------
# symmetry finding
# ---------------------------------------------------------------------------


def test_find_z2_on_truncated_zrv():
    psum, _ = qmap.parity_map(ks_hamiltonian(), 4, 0.0)
    trunc, _ = qmap.truncate(psum, 0.01)
    assert qmap.find_z2_symmetries(trunc) == ["ZIZI"]
    assert qmap.find_z2_symmetries(psum) == []


def test_find_z2_brute_force_small():
    p = PauliSum.from_terms(4, [(1.0, "XIII")])
    syms = qmap.find_z2_symmetries(p)
    # brute-force: Z-type strings commuting with X on qubit 3 avoid qubit 3
    want = []
    for zmask in range(1, 16):
        if not (zmask >> 3) & 1:
            want.append(qmap.mask_to_string(0, zmask, 4))
    assert sorted(syms) == sorted(want)


def test_find_z2_identity_sum():
    p = PauliSum.from_terms(3, [(2.0, "III")])
    assert len(qmap.find_z2_symmetries(p)) == 2**3 - 1


# ---------------------------------------------------------------------------
# tapering
# ---------------------------------------------------------------------------


def test_taper_sector_union_reproduces_spectrum():
    psum, _ = qmap.parity_map(ks_hamiltonian(), 4, 0.0)
    trunc, _ = qmap.truncate(psum, 0.01)
    full = np.sort(np.linalg.eigvalsh(trunc.to_matrix()))
    wp = np.linalg.eigvalsh(qmap.taper(trunc, "ZIZI", +1).to_matrix())
    wm = np.linalg.eigvalsh(qmap.taper(trunc, "ZIZI", -1).to_matrix())
    assert np.max(np.abs(np.sort(np.r_[wp, wm]) - full)) < 1e-9


def test_taper_diagonal_substitution():
    # diagonal operator, Z-type symmetry on the dropped qubit: the letter is
    # replaced by the sector eigenvalue
    p = PauliSum.from_terms(4, [(0.5, "ZIIZ"), (0.25, "IIZI")])
    for sign in (+1, -1):
        out = qmap.taper(p, "ZIII", sign, target_qubit=3)
        assert out.n_qubits == 3
        assert out.coeff("IIZ") == pytest.approx(0.5 * sign)  # Z3 -> sign
        assert out.coeff("IZI") == pytest.approx(0.25)  # untouched by qubit 3


def test_taper_random_commuting_pair():
    rng = np.random.default_rng(12)
    sym = "IZZ"
    sx, sz = string_to_mask(sym)
    p = PauliSum(3)
    added = 0
    while added < 6:
        x, z = int(rng.integers(8)), int(rng.integers(8))
        if qmap.masks_commute(x, z, sx, sz):
            p.add(float(rng.normal()), x, z)
            added += 1
    # Hermitize: PauliSum with real coeffs in our storage convention is Hermitian
    full = np.sort(np.linalg.eigvalsh(p.to_matrix()))
    both = []
    for sign in (+1, -1):
        both.extend(np.linalg.eigvalsh(qmap.taper(p, sym, sign).to_matrix()).tolist())
    assert np.max(np.abs(np.sort(both) - full)) < 1e-9


def test_taper_rejects_non_commuting():
    p = PauliSum.from_terms(2, [(1.0, "XI")])
    with pytest.raises(ValueError):
        qmap.taper(p, "ZI", +1)


def test_taper_gap_ratios():
    prep = prepare_system("zrv", "hse", 0.01)
    s1 = 0.8 / np.sqrt(1 - 0.64)
    g = np.pi / (2 * s1 * (prep.energies[1] - prep.energies[0]))
    e = np.pi / (2 * s1 * (prep.energies[2] - prep.energies[1]))
    assert g == pytest.approx(2.41, abs=0.02)
    assert e == pytest.approx(0.57, abs=0.02)


# ---------------------------------------------------------------------------
# generator grouping
# ---------------------------------------------------------------------------


def test_generator_matches_template():
    prep = prepare_system("zrv", "hse", 0.01)
    gen = prep.generator
    assert [qmap.mask_to_string(x >> 1, z >> 1, 3) for _, x, z in gen.lambda1] == list(
        qmap.LAMBDA1_TEMPLATE
    )
    v1 = {qmap.mask_to_string(x >> 1, z >> 1, 3) for _, x, z in gen.v1}
    v2 = {qmap.mask_to_string(x >> 1, z >> 1, 3) for _, x, z in gen.v2}
    assert v1 == set(qmap.V1_TEMPLATE)
    assert v2 == set(qmap.V2_TEMPLATE)
    assert not gen.warnings


def test_generator_every_term_conditioned():
    prep = prepare_system("zrv", "hse", 0.01)
    for group in prep.generator.groups().values():
        for _, x, z in group:
            assert z & 1 and not x & 1  # Z on the conditioning wire


def test_generator_flatten_equals_tensor():
    prep = prepare_system("zrv", "hse", 0.01)
    dense = prep.generator.flattened().to_matrix()
    want = np.kron(prep.tapered.to_matrix(), np.diag([1.0, -1.0]))
    assert np.max(np.abs(dense - want)) < 1e-12


def test_generator_diagonal_only():
    p = PauliSum.from_terms(3, [(0.5, "ZIZ"), (0.1, "IZI")])
    gen = qmap.build_crte_generator(p)
    assert not gen.v1 and not gen.v2
    assert len(gen.lambda1) + len(gen.lambda2) == 2


def test_generator_unknown_string_warns_into_v2():
    p = PauliSum.from_terms(3, [(0.5, "ZYY")])  # outside the fixed template
    with pytest.warns(UserWarning):
        gen = qmap.build_crte_generator(p)
    assert len(gen.v2) == 1
    assert gen.warnings


def test_shift_merges_into_existing_term():
    p = PauliSum.from_terms(3, [(0.5, "ZIZ"), (2.0, "III")])
    gen = qmap.build_crte_generator(p)
    n_terms = sum(len(g) for g in gen.groups().values())
    shifted = gen.with_shift(1.25)
    assert sum(len(g) for g in shifted.groups().values()) == n_terms
    dense = shifted.flattened().to_matrix()
    want = np.kron(p.to_matrix() - 1.25 * np.eye(8), np.diag([1.0, -1.0]))
    assert np.max(np.abs(dense - want)) < 1e-12


# ---------------------------------------------------------------------------
# determinant encoding
# ---------------------------------------------------------------------------


def test_encode_decode_round_trip_every_sector_state():
    prep = prepare_system("zrv", "hse", 0.01)
    m = prep.mapping
    for idx in range(8):
        det = m.tapered_index_to_det(idx)
        back, sign = m.det_to_tapered_index(det)
        assert back == idx
        assert sign == 1  # plus sector carries no signs


def test_encode_single_determinant():
    prep = prepare_system("zrv", "hse", 0.01)
    det = 0b011011  # both orbitals 0,1 doubly occupied
    vec = qmap.encode_determinant_state({det: 1.0}, prep.mapping)
    assert np.count_nonzero(np.abs(vec) > 1e-12) == 1
    idx = int(np.argmax(np.abs(vec)))
    assert prep.mapping.tapered_index_to_det(idx) == det


def test_encode_rejects_out_of_sector():
    prep = prepare_system("zrv", "hse", 0.01)
    with pytest.raises(ValueError):
        qmap.encode_determinant_state({0b000111: 1.0}, prep.mapping)  # N_up odd


def test_encode_rejects_unnormalized():
    prep = prepare_system("zrv", "hse", 0.01)
    with pytest.raises(ValueError):
        qmap.encode_determinant_state({0b011011: 0.5}, prep.mapping)


def test_initial_state_overlap():
    prep = prepare_system("zrv", "hse", 0.01)
    phi = prep.states
    init = (3 * phi[:, 0] + phi[:, 1] + phi[:, 2] + phi[:, 3]) / np.sqrt(12.0)
    assert np.linalg.norm(init) == pytest.approx(1.0, abs=1e-12)
    assert np.dot(phi[:, 0], init) ** 2 == pytest.approx(0.75, abs=1e-12)


def test_encoded_hamiltonian_matches_sector_restriction():
    # matrix elements of the tapered operator in encoded-determinant basis
    # agree with the untapered operator between the same determinants
    prep = prepare_system("zrv", "hse", 0.01)
    trunc = prep.truncated
    mat4 = trunc.to_matrix()
    mat3 = prep.tapered.to_matrix()
    m = prep.mapping
    for i in range(8):
        for j in range(8):
            di, dj = m.tapered_index_to_det(i), m.tapered_index_to_det(j)
            ri = m.det_to_reduced_index(di)
            rj = m.det_to_reduced_index(dj)
            assert mat3[i, j] == pytest.approx(mat4[ri, rj], abs=1e-10)
