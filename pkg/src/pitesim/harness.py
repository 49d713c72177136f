"""Experiment orchestration: parameter tables to shot-sampled reports.

A run wires the full chain together: tabulated (t, U, J) matrices, exact
diagonalization, qubit mapping with truncation and symmetry tapering,
filter-step scheduling, amplitude encoding, optional error-detection
encoding, trajectory sampling, and the summary statistics (success
probabilities, discard rates, histograms, fidelity, error split).
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import effham, iceberg, pite, qmap, stateprep
from .circuit import CircuitIR, lower_diagonal_rotations
from .effham import OrbitalModelParams
from .pite import PiteConstants, PiteSchedule, make_schedule, pite_constants
from .qmap import CrteGenerator, QubitMapping
from .sim import (
    MseStats,
    NoiseModel,
    ShotRunner,
    classical_fidelity,
    discard_model,
    mse_stats,
    run_noiseless_branches,
)

SYSTEMS = ("zrv", "hfv", "tiv", "nv")
FUNCTIONALS = ("hse", "pbe")
DEFAULT_THRESHOLDS = {"zrv": 0.01, "hfv": 0.01, "tiv": 0.005, "nv": 0.07}
DEFAULT_P2 = 1.6e-3
DEFAULT_SPAM = 0.0
N_ELECTRONS = 4
SZ = 0.0


@dataclass
class ExperimentConfig:
    system: str = "zrv"
    functional: str = "hse"
    mode: str = "ground"
    n_steps: int = 4
    m0: float = 0.8
    shots: int = 1000
    p2: float = DEFAULT_P2
    spam: float = DEFAULT_SPAM
    encoded: bool = True
    threshold: float | None = None
    seed: int = 20240901
    outdir: str | None = None

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ValueError(f"unknown system {self.system!r}")
        if self.functional not in FUNCTIONALS:
            raise ValueError(f"unknown functional {self.functional!r}")
        if self.mode not in ("ground", "excited"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.threshold is None:
            self.threshold = DEFAULT_THRESHOLDS[self.system]

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        """Plain key = value file; unknown keys rejected."""
        values: dict = {}
        for raw in Path(path).read_text().splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
        kwargs = {}
        for f_ in cls.__dataclass_fields__.values():
            if f_.name in values:
                v = values[f_.name]
                if f_.type in ("int", "int | None"):
                    kwargs[f_.name] = int(v)
                elif f_.type in ("float", "float | None"):
                    kwargs[f_.name] = float(v)
                elif f_.type == "bool":
                    kwargs[f_.name] = v.lower() in ("1", "true", "yes")
                else:
                    kwargs[f_.name] = v
        unknown = set(values) - set(kwargs)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs.update(overrides)
        return cls(**kwargs)


# ---------------------------------------------------------------------------
# data loading and system preparation
# ---------------------------------------------------------------------------


def data_dir() -> Path | None:
    env = os.environ.get("PITESIM_DATA")
    return Path(env) if env else None


def load_params(system: str, functional: str) -> OrbitalModelParams:
    name = f"{system}_{functional}.txt"
    override = data_dir()
    if override is not None:
        text = (override / name).read_text()
    else:
        text = resources.files("pitesim.data").joinpath(name).read_text()
    return OrbitalModelParams.from_text(text, label=f"{system}-{functional}")


@dataclass
class PreparedSystem:
    """Everything derived from one parameter table at a given truncation."""

    params: OrbitalModelParams
    h_ks: effham.SecondQuantizedHamiltonian
    mapping: QubitMapping
    mapped: qmap.PauliSum
    truncated: qmap.PauliSum
    truncation: qmap.TruncationReport
    symmetry: str
    tapered: qmap.PauliSum
    generator: CrteGenerator
    energies: np.ndarray  # tapered-sector levels at the run's particle number
    states: np.ndarray  # columns, real, over the tapered basis
    ground_sector_energy: float  # absolute sector reference (FCI)

    @property
    def n_system_qubits(self) -> int:
        return self.tapered.n_qubits


def _closed_shell_det(n_orb: int, n_up: int, n_dn: int) -> int:
    det = 0
    for i in range(n_up):
        det |= 1 << i
    for i in range(n_dn):
        det |= 1 << (n_orb + i)
    return det


def prepare_system(
    system: str,
    functional: str,
    threshold: float,
    n_electrons: int = N_ELECTRONS,
    sz: float = SZ,
) -> PreparedSystem:
    params = load_params(system, functional)
    h_w = effham.build_wannier_hamiltonian(params)
    h_ks = effham.to_ks_basis(h_w)
    mapped, mapping = qmap.parity_map(h_ks, n_electrons, sz)
    truncated, trunc_report = qmap.truncate(mapped, threshold)
    syms = qmap.find_z2_symmetries(truncated)
    if not syms:
        raise RuntimeError("no symmetry left after truncation; cannot taper")
    symmetry = "ZIZI" if "ZIZI" in syms else syms[0]

    # eigensector containing the closed-shell reference determinant
    n_up = round(n_electrons / 2 + sz)
    ref = _closed_shell_det(params.n_orb, n_up, n_electrons - n_up)
    sx, szm = qmap.string_to_mask(symmetry)
    support = tuple(q for q in range(truncated.n_qubits) if (szm >> q) & 1)
    ref_idx = mapping.det_to_reduced_index(ref)
    par = sum((ref_idx >> q) & 1 for q in support) % 2
    sector = 1 if par == 0 else -1

    tapered = qmap.taper(truncated, symmetry, sector)
    mapping.taper_support = support
    mapping.taper_qubit = support[0]
    mapping.taper_sign = sector

    mat = tapered.to_matrix()
    if np.max(np.abs(mat.imag)) > 1e-9:
        raise RuntimeError("tapered Hamiltonian is not real; check the term template")
    w, v = np.linalg.eigh(mat.real)
    for k in range(v.shape[1]):
        col = v[:, k]
        if col[np.argmax(np.abs(col))] < 0:
            v[:, k] = -col
    basis_n = [
        bin(mapping.tapered_index_to_det(i)).count("1") for i in range(mat.shape[0])
    ]
    nbar = (np.abs(v) ** 2 * np.array(basis_n)[:, None]).sum(axis=0)
    keep = np.abs(nbar - n_electrons) < 0.25
    if keep.sum() < 4:
        raise RuntimeError("fewer than four sector states at the run particle number")
    states = v[:, keep]

    gen = qmap.build_crte_generator(tapered, warn=False)
    fci = effham.fci_diagonalize(h_ks, n_electrons, sz)

    # schedule and shift use the exact sector energies: match each run
    # state to its untruncated eigenstate through the encoding map
    fci_encoded = []
    for j in range(len(fci.energies)):
        vec = np.zeros(states.shape[0], dtype=complex)
        for a, det in enumerate(fci.determinants):
            c = fci.eigenvectors[a, j]
            if abs(c) < 1e-14:
                continue
            try:
                idx, sign = mapping.det_to_tapered_index(det)
            except ValueError:
                continue
            vec[idx] += sign * c
        fci_encoded.append(vec)
    energies = np.empty(states.shape[1])
    for k in range(states.shape[1]):
        overlaps = [abs(np.vdot(states[:, k], fe)) for fe in fci_encoded]
        energies[k] = fci.energies[int(np.argmax(overlaps))]
    return PreparedSystem(
        params=params,
        h_ks=h_ks,
        mapping=mapping,
        mapped=mapped,
        truncated=truncated,
        truncation=trunc_report,
        symmetry=symmetry,
        tapered=tapered,
        generator=gen,
        energies=energies,
        states=states,
        ground_sector_energy=float(fci.energies[0]),
    )


def initial_state(prep: PreparedSystem, mode: str) -> tuple[np.ndarray, int]:
    """The run's starting vector and the index of its target level."""
    phi = prep.states
    if mode == "ground":
        vec = (3 * phi[:, 0] + phi[:, 1] + phi[:, 2] + phi[:, 3]) / np.sqrt(12.0)
        return vec, 0
    vec = (phi[:, 1] + phi[:, 2] + phi[:, 3]) / np.sqrt(3.0)
    return vec, 1


# ---------------------------------------------------------------------------
# circuit assembly
# ---------------------------------------------------------------------------


@dataclass
class RunSpec:
    """Bit bookkeeping needed to interpret a shot record."""

    encoded: bool
    n_bits: int = 0
    check_bits: list[tuple[str, int, int]] = field(default_factory=list)  # name, bit, step
    step_bits: list[tuple[int, int]] = field(default_factory=list)  # (c0, cz or -1)
    readout_bits: dict[str, int] = field(default_factory=dict)
    allowed_decoded: tuple[int, ...] | None = None  # particle-sector verification
    prep_2q: int = 0  # encode + amplitude encoding + initial check
    step_block_2q: list[int] = field(default_factory=list)
    step_cum_2q: list[int] = field(default_factory=list)  # executed through step k
    total_2q: int = 0
    n_syndromes: int = 0

    def alloc(self) -> int:
        b = self.n_bits
        self.n_bits += 1
        return b


def _logical_step_blocks(
    prep: PreparedSystem, consts: PiteConstants, schedule: PiteSchedule, k: int
) -> list[tuple[str, CircuitIR]]:
    return pite.step_blocks(
        prep.generator, consts, schedule.dtau[k], schedule.r[k], shift=schedule.energy_shift
    )


def build_unencoded_circuit(
    prep: PreparedSystem,
    consts: PiteConstants,
    schedule: PiteSchedule,
    init_vec: np.ndarray,
    measure_system: bool = True,
) -> tuple[CircuitIR, RunSpec]:
    """Bare run on n_system+1 wires; ancilla is wire 0."""
    n_wires = prep.n_system_qubits + 1
    spec = RunSpec(encoded=False)
    circ = CircuitIR(n_wires)
    sys_wires = tuple(range(1, n_wires))
    circ.extend(
        lower_diagonal_rotations(stateprep.real_state_prep(init_vec, sys_wires, n_wires))
    )
    spec.prep_2q = circ.count_two_qubit_gates()
    for k in range(schedule.n_steps):
        for _, block in _logical_step_blocks(prep, consts, schedule, k):
            circ.extend(lower_diagonal_rotations(block))
        c0 = spec.alloc()
        circ.measure(0, c0, tag=f"step{k}-anc")
        spec.step_bits.append((c0, -1))
        if k + 1 < schedule.n_steps:
            circ.reset(0, tag=f"step{k}-anc")
        spec.step_block_2q.append(
            circ.count_two_qubit_gates()
            - (spec.step_cum_2q[-1] if spec.step_cum_2q else spec.prep_2q)
        )
        spec.step_cum_2q.append(circ.count_two_qubit_gates())
    if measure_system:
        for i, w in enumerate(sys_wires):
            b = spec.alloc()
            circ.measure(w, b, tag="readout")
            spec.readout_bits[f"d{i + 1}"] = b
    circ.n_bits = spec.n_bits
    spec.total_2q = circ.count_two_qubit_gates()
    return circ, spec


def build_encoded_circuit(
    prep: PreparedSystem,
    consts: PiteConstants,
    schedule: PiteSchedule,
    init_vec: np.ndarray,
) -> tuple[CircuitIR, RunSpec]:
    """Error-detected run on k+4 wires with mid-circuit checks."""
    n_logical = prep.n_system_qubits + 1
    layout = iceberg.IcebergLayout(k=n_logical)
    spec = RunSpec(encoded=True)
    circ = CircuitIR(layout.n_wires)

    def add_syndrome(step: int):
        bx, bz = spec.alloc(), spec.alloc()
        circ.extend(iceberg.syndrome_circuit(layout, bx, bz))
        spec.check_bits.append((f"syn{spec.n_syndromes}_x", bx, step))
        spec.check_bits.append((f"syn{spec.n_syndromes}_z", bz, step))
        spec.n_syndromes += 1

    fb = spec.alloc()
    circ.extend(iceberg.encode_zero_circuit(layout, flag_bit=fb))
    spec.check_bits.append(("encode_flag", fb, 0))

    prep_logical = stateprep.real_state_prep(
        init_vec, tuple(range(1, n_logical)), n_logical
    )
    circ.extend(iceberg.compile_logical(prep_logical, layout).circuit)
    add_syndrome(0)

    spec.prep_2q = circ.count_two_qubit_gates()
    for k in range(schedule.n_steps):
        blocks = _logical_step_blocks(prep, consts, schedule, k)
        slice_close = 0
        for name, block in blocks:
            circ.extend(iceberg.compile_logical(block, layout).circuit)
            if name == "v2":
                add_syndrome(k + 1)
            elif name == "lambda":
                slice_close += 1
                if slice_close % 2 == 0:  # closing half-layer of a slice
                    add_syndrome(k + 1)
        c0, cz = spec.alloc(), spec.alloc()
        final = k + 1 == schedule.n_steps
        if final:
            circ.extend(iceberg.measure_and_reencode(layout, c0, cz, -1, final=True))
        else:
            flag = spec.alloc()
            circ.extend(iceberg.measure_and_reencode(layout, c0, cz, flag))
            spec.check_bits.append((f"reencode_flag{k}", flag, k + 1))
        spec.step_bits.append((c0, cz))
        spec.step_block_2q.append(
            circ.count_two_qubit_gates()
            - (spec.step_cum_2q[-1] if spec.step_cum_2q else spec.prep_2q)
        )
        spec.step_cum_2q.append(circ.count_two_qubit_gates())

    ro = spec.alloc()
    for _ in range(n_logical - 1):
        spec.alloc()
    circ.extend(iceberg.final_readout_circuit(layout, ro))
    spec.readout_bits["qx"] = ro
    for i in range(1, n_logical):
        spec.readout_bits[f"d{i}"] = ro + i
    circ.n_bits = spec.n_bits
    spec.total_2q = circ.count_two_qubit_gates()
    return circ, spec


def decode_shot(bits: np.ndarray, spec: RunSpec, layout_k: int = 4):
    """Interpret one bit record.

    Returns (discarded, first_failed_check, step_successes, decoded_index)
    with decoded_index = -1 on discard.
    """
    for name, bit, _step in spec.check_bits:
        if bits[bit]:
            return True, name, [], -1
    successes = []
    for c0, cz in spec.step_bits:
        if cz < 0:
            successes.append(1 if bits[c0] == 0 else 0)
        else:
            successes.append(1 if bits[c0] == bits[cz] else 0)
    if spec.encoded:
        c0, cz = spec.step_bits[-1]
        layout = iceberg.IcebergLayout(k=layout_k)
        wire_bits = {0: int(bits[c0]), layout.qz: int(bits[cz]), layout.qx: int(bits[spec.readout_bits["qx"]])}
        for i in range(1, layout_k):
            wire_bits[i] = int(bits[spec.readout_bits[f"d{i}"]])
        logical = iceberg.final_readout_decode(wire_bits, layout)
        if logical is None:
            return True, "readout_parity", successes, -1
        decoded = logical >> 1  # drop the step-ancilla bit
        if spec.allowed_decoded is not None and decoded not in spec.allowed_decoded:
            # readout lies outside the conserved-particle-number sector:
            # certifies an undetected logical fault, so the shot is dropped
            return True, "readout_sector", successes, -1
    else:
        decoded = 0
        for key, bit in spec.readout_bits.items():
            i = int(key[1:])
            decoded |= int(bits[bit]) << (i - 1)
    return False, "", successes, decoded


def first_check_step(bits: np.ndarray, spec: RunSpec) -> int | None:
    """Step index (0 = preparation) of the first fired check, if any."""
    for name, bit, step in spec.check_bits:
        if bits[bit]:
            return step
    return None


# ---------------------------------------------------------------------------
# experiment driver
# ---------------------------------------------------------------------------


@dataclass
class ExperimentReport:
    config: dict
    schedule: dict
    sector_energies: list[float]
    ideal_overlap: float
    basis_labels: list[str]
    fci_hist: list[float]
    noiseless_ptot: list[float]
    noiseless_hist: list[float]
    noiseless_fidelity: float
    gate_counts: dict
    shots: int = 0
    retained: int = 0
    discard_rate: float = 0.0
    discard_by_step: list[float] = field(default_factory=list)
    discard_model_by_step: list[float] = field(default_factory=list)
    ptot_est: list[float] = field(default_factory=list)
    ptot_err: list[float] = field(default_factory=list)
    ptot_mse: list[dict] = field(default_factory=list)
    hist: list[float] = field(default_factory=list)
    hist_mse: list[dict] = field(default_factory=list)
    fidelity_fci: float = 0.0
    fidelity_noiseless: float = 0.0
    runlog: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)


def _basis_labels(prep: PreparedSystem) -> list[str]:
    labels = []
    for idx in range(2**prep.n_system_qubits):
        det = prep.mapping.tapered_index_to_det(idx)
        labels.append(effham.determinant_label(det, prep.params.n_orb))
    return labels


def _success_postselect_chain(res, spec: RunSpec):
    """Noiseless per-step cumulative success probabilities and final mix."""
    n_steps = len(spec.step_bits)
    ptot = []
    for k in range(n_steps):
        acc = 0.0
        for leaf in res.leaves:
            ok = all(
                (leaf.bits[c0] == 0 if cz < 0 else leaf.bits[c0] == leaf.bits[cz])
                for c0, cz in spec.step_bits[: k + 1]
            )
            if ok:
                acc += leaf.probability
        ptot.append(acc)
    return ptot


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    prep = prepare_system(cfg.system, cfg.functional, cfg.threshold)
    consts = pite_constants(cfg.m0)
    schedule = make_schedule(cfg.mode, prep.energies, cfg.n_steps, cfg.m0)
    init_vec, target = initial_state(prep, cfg.mode)
    dim = 2**prep.n_system_qubits

    fci_hist = (prep.states[:, target] ** 2).tolist()
    ideal_overlap = float(np.dot(prep.states[:, target], init_vec) ** 2)

    # exact noiseless reference (bare circuit, no final system collapse)
    ref_circ, ref_spec = build_unencoded_circuit(
        prep, consts, schedule, init_vec, measure_system=False
    )
    ref = run_noiseless_branches(ref_circ)
    noiseless_ptot = _success_postselect_chain(ref, ref_spec)
    mix = np.zeros(dim)
    for leaf in ref.leaves:
        if all(leaf.bits[c0] == 0 for c0, _ in ref_spec.step_bits):
            probs = np.abs(leaf.state) ** 2
            mix += leaf.probability * probs.reshape(dim, 2).sum(axis=1)
    noiseless_hist = (mix / mix.sum()).tolist()

    # gate accounting comes from the sampled variant's circuit
    if cfg.encoded:
        circ, spec = build_encoded_circuit(prep, consts, schedule, init_vec)
        spec.allowed_decoded = tuple(
            idx
            for idx in range(dim)
            if bin(prep.mapping.tapered_index_to_det(idx)).count("1") == N_ELECTRONS
        )
    else:
        circ, spec = build_unencoded_circuit(prep, consts, schedule, init_vec)

    report = ExperimentReport(
        config={
            "system": cfg.system,
            "functional": cfg.functional,
            "mode": cfg.mode,
            "n_steps": cfg.n_steps,
            "m0": cfg.m0,
            "shots": cfg.shots,
            "p2": cfg.p2,
            "spam": cfg.spam,
            "encoded": cfg.encoded,
            "threshold": cfg.threshold,
            "seed": cfg.seed,
        },
        schedule={
            "dtau": list(schedule.dtau),
            "r": list(schedule.r),
            "energy_shift": schedule.energy_shift,
            "m0": schedule.m0,
        },
        sector_energies=prep.energies.tolist(),
        ideal_overlap=ideal_overlap,
        basis_labels=_basis_labels(prep),
        fci_hist=fci_hist,
        noiseless_ptot=noiseless_ptot,
        noiseless_hist=noiseless_hist,
        noiseless_fidelity=classical_fidelity(noiseless_hist, fci_hist),
        gate_counts={
            "total_2q": spec.total_2q,
            "prep_2q": spec.prep_2q,
            "per_step_2q": spec.step_block_2q,
            "cumulative_2q": spec.step_cum_2q,
            "n_syndromes": spec.n_syndromes,
        },
    )
    if cfg.shots <= 0:
        return report

    noise = NoiseModel(p2=cfg.p2, spam=cfg.spam)
    runner = ShotRunner(circ, noise)
    n_steps = schedule.n_steps
    success_count = np.zeros(n_steps)
    retained = 0
    discard_step_counts = np.zeros(n_steps + 1)
    hist_counts = np.zeros(dim)
    success_indicators: list[np.ndarray] = []
    decoded_list: list[int] = []
    runlog = []
    for s in range(cfg.shots):
        bits = runner.run(cfg.seed, s)
        discarded, check, successes, decoded = decode_shot(
            bits, spec, layout_k=prep.n_system_qubits + 1
        )
        if discarded and check not in ("readout_parity", "readout_sector"):
            discard_step_counts[first_check_step(bits, spec)] += 1
        elif discarded:
            discard_step_counts[n_steps] += 1
        if not discarded:
            retained += 1
            ind = np.cumprod(successes)
            success_indicators.append(ind)
            success_count += ind
            if ind[-1]:
                decoded_list.append(decoded)
                hist_counts[decoded] += 1
        runlog.append(
            {
                "shot": s,
                "discarded": int(discarded),
                "check": check,
                "successes": "".join(map(str, successes)),
                "decoded": decoded,
            }
        )

    report.shots = cfg.shots
    report.retained = retained
    report.discard_rate = 1.0 - retained / cfg.shots
    # cumulative discard fraction per step prefix (step 0 = preparation)
    cum = np.cumsum(discard_step_counts)
    report.discard_by_step = (cum[1:] / cfg.shots).tolist()
    report.discard_model_by_step = [
        discard_model(n, cfg.p2) for n in spec.step_cum_2q
    ]
    if retained:
        est = success_count / retained
        report.ptot_est = est.tolist()
        report.ptot_err = [
            float(np.sqrt(max(p * (1 - p), 1e-12) / retained)) for p in est
        ]
        ind_mat = np.array(success_indicators)
        report.ptot_mse = [
            asdict(mse_stats(ind_mat[:, k], noiseless_ptot[k])) for k in range(n_steps)
        ]
        n_success = int(success_count[-1])
        if n_success:
            hist = hist_counts / n_success
            report.hist = hist.tolist()
            report.fidelity_fci = classical_fidelity(hist, fci_hist)
            report.fidelity_noiseless = classical_fidelity(hist, noiseless_hist)
            dec_arr = np.array(decoded_list)
            report.hist_mse = [
                asdict(mse_stats((dec_arr == d).astype(float), noiseless_hist[d]))
                for d in range(dim)
            ]
    report.runlog = runlog
    return report


# ---------------------------------------------------------------------------
# outputs
# ---------------------------------------------------------------------------


def emit_outputs(report: ExperimentReport, formats: set[str], outdir: str | Path) -> list[Path]:
    if not report.basis_labels:
        raise ValueError("empty report")
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if "json" in formats:
        p = out / "report.json"
        p.write_text(report.to_json())
        written.append(p)

    if "csv" in formats:
        p = out / "success_vs_step.csv"
        rows = ["step,dtau,noiseless,estimate,stderr,bias,var,mse"]
        for k in range(len(report.noiseless_ptot)):
            est = report.ptot_est[k] if report.ptot_est else ""
            err = report.ptot_err[k] if report.ptot_err else ""
            m = report.ptot_mse[k] if report.ptot_mse else {}
            rows.append(
                f"{k + 1},{report.schedule['dtau'][k]:.6f},{report.noiseless_ptot[k]:.6f},"
                f"{est},{err},{m.get('bias', '')},{m.get('var', '')},{m.get('mse', '')}"
            )
        p.write_text("\n".join(rows) + "\n")
        written.append(p)

        p = out / "discard_vs_gates.csv"
        rows = ["step,cum_two_qubit,discard_empirical,discard_model"]
        for k, n2q in enumerate(report.gate_counts["cumulative_2q"]):
            emp = report.discard_by_step[k] if report.discard_by_step else ""
            rows.append(f"{k + 1},{n2q},{emp},{discard_model(n2q, report.config['p2']):.6f}")
        p.write_text("\n".join(rows) + "\n")
        written.append(p)

        p = out / "histogram.csv"
        rows = ["index,label,fci,noiseless,sampled,mse"]
        for d, label in enumerate(report.basis_labels):
            samp = report.hist[d] if report.hist else ""
            m = report.hist_mse[d].get("mse", "") if report.hist_mse else ""
            rows.append(
                f"{d},{label},{report.fci_hist[d]:.6f},{report.noiseless_hist[d]:.6f},{samp},{m}"
            )
        p.write_text("\n".join(rows) + "\n")
        written.append(p)

        p = out / "shots.csv"
        rows = ["shot,discarded,check,successes,decoded"]
        for r in report.runlog:
            rows.append(f"{r['shot']},{r['discarded']},{r['check']},{r['successes']},{r['decoded']}")
        p.write_text("\n".join(rows) + "\n")
        written.append(p)

    if "svg" in formats:
        written.extend(_emit_svg(report, out))
    return written


def _emit_svg(report: ExperimentReport, out: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    steps = np.arange(1, len(report.noiseless_ptot) + 1)

    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.plot(steps, report.noiseless_ptot, "o-", label="noiseless")
    if report.ptot_est:
        ax.errorbar(steps, report.ptot_est, yerr=report.ptot_err, fmt="s-", label="sampled")
    ax.axhline(report.ideal_overlap, ls=":", c="gray", label="ideal overlap")
    ax.set_xlabel("step")
    ax.set_ylabel("total success probability")
    ax.legend()
    fig.tight_layout()
    p = out / "success.svg"
    fig.savefig(p)
    plt.close(fig)
    written.append(p)

    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    n2q = report.gate_counts["cumulative_2q"]
    ax.plot(n2q, report.discard_model_by_step or [discard_model(n, report.config["p2"]) for n in n2q], "--", label="model")
    if report.discard_by_step:
        ax.plot(n2q, report.discard_by_step, "o", label="empirical")
    ax.set_xlabel("two-qubit gates")
    ax.set_ylabel("discard rate")
    ax.legend()
    fig.tight_layout()
    p = out / "discard.svg"
    fig.savefig(p)
    plt.close(fig)
    written.append(p)

    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    x = np.arange(len(report.basis_labels))
    width = 0.27
    ax.bar(x - width, report.fci_hist, width, label="reference")
    ax.bar(x, report.noiseless_hist, width, label="noiseless")
    if report.hist:
        ax.bar(x + width, report.hist, width, label="sampled")
    ax.set_xticks(x)
    ax.set_xticklabels(report.basis_labels, rotation=60, fontsize=6, ha="right")
    ax.set_ylabel("probability")
    ax.legend()
    fig.tight_layout()
    p = out / "histogram.svg"
    fig.savefig(p)
    plt.close(fig)
    written.append(p)
    return written
