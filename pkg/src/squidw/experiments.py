"""Named, reproducible experiment drivers plus generic sweep machinery.

Every driver writes `<name>.csv` (RFC-4180, header row) and `<name>.meta.json`
(schema-versioned) into an output directory and returns its records. Table
drivers additionally emit `<name>_compare.csv` holding reference value,
computed value, delta, and verdict per row. All runs are deterministic:
identical inputs produce byte-identical files, with or without a worker pool.

The bundled reference tables are the expected outcomes used by the regression
suite and the `reproduce` command.
"""

from __future__ import annotations

import csv
import json
import math
import multiprocessing
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from .dynamics import (
    NoiseModel,
    TimeGrid,
    Trajectory,
    fidelity,
    lindblad_operators,
    propagate_lindblad,
    propagate_schrodinger,
)
from .pulse_design import (
    PulseSchedule,
    ScheduleParams,
    dressed_pulses,
    gaussian_fit_pulses,
    modified_controls,
    scaled,
    schedule_angles,
    stirap_pulses,
    with_duration,
)
from .state_space import (
    PSI1,
    CouplingConfig,
    basis_state,
    cavity_hamiltonian,
    dark_state,
    drive_hamiltonian,
    effective_hamiltonian,
)

SCHEMA_VERSION = 1
CODE_VERSION = "0.1.0"

FIDELITY_TOLERANCE = 0.01

# Final fidelity versus (kappa/g, gamma/g, gamma_phi/g) at g = 30/T with the
# gaussian flavor; the regression anchors for the decoherence study.
TABLE1_REFERENCE = (
    (1.0e-2, 1.0e-2, 1.0e-3, 0.9389),
    (1.0e-2, 1.0e-2, 0.8e-3, 0.9421),
    (1.0e-2, 0.8e-2, 1.0e-3, 0.9473),
    (0.8e-2, 1.0e-2, 1.0e-3, 0.9390),
    (0.8e-2, 0.8e-2, 0.8e-3, 0.9507),
    (0.8e-2, 0.8e-2, 0.5e-3, 0.9556),
    (0.8e-2, 0.5e-2, 0.8e-3, 0.9635),
    (0.5e-2, 0.8e-2, 0.8e-3, 0.9509),
    (0.5e-2, 0.5e-2, 0.5e-3, 0.9687),
    (0.5e-2, 0.5e-2, 0.3e-3, 0.9721),
    (0.5e-2, 0.3e-2, 0.5e-3, 0.9775),
    (0.3e-2, 0.5e-2, 0.5e-3, 0.9659),
    (0.3e-2, 0.3e-2, 0.3e-3, 0.9811),
    (0.3e-2, 0.3e-2, 0.1e-3, 0.9845),
    (0.3e-2, 0.1e-2, 0.3e-3, 0.9900),
    (0.1e-2, 0.3e-2, 0.3e-3, 0.9812),
    (0.1e-2, 0.1e-2, 0.1e-3, 0.9936),
)

# Reference fidelities versus the error triple (dT/T, dOmega0/Omega0, dg/g).
# Known discrepancy: under the rescaling interpretation implemented here the
# simulation does NOT land within 0.01 of most of these rows (dT is nearly a
# no-op once the waveforms are re-parameterized by T'); see README and the
# variation drivers, which report the honest comparison.
TABLE2_REFERENCE = (
    (+0.10, +0.10, +0.10, 0.9907),
    (+0.10, +0.10, -0.10, 0.9907),
    (+0.10, -0.10, +0.10, 0.9944),
    (+0.10, -0.10, -0.10, 0.9944),
    (-0.10, +0.10, +0.10, 0.9965),
    (-0.10, +0.10, -0.10, 0.9964),
    (-0.10, -0.10, +0.10, 0.9798),
    (-0.10, -0.10, -0.10, 0.9796),
)

# (omega0, g, expected F, tolerance) for the baseline comparison.
STIRAP_REFERENCE = (
    (9.8, 30.0, 0.275, 0.03),
    (40.0, 120.0, 0.985, 0.01),
)
# The strongest baseline configuration must clear 0.99 yet stay below the
# dressed protocol.
STIRAP_STRONG = (50.0, 150.0)

DEPHASING_REFERENCE = {"protocol": (0.983, 0.01), "stirap": (0.942, 0.02)}

REALISTIC_RATIOS = (1.32 / 180.0, 1.32 / 180.0, 0.01 / 180.0)
REALISTIC_REFERENCE = 0.9659

_AXIS_NAMES = frozenset(
    {
        "g",
        "kappa_over_g",
        "gamma_over_g",
        "gammaphi_over_g",
        "dT_over_T",
        "dOmega_over_Omega",
        "dg_over_g",
        "omega0_stirap",
    }
)

_FLAVORS = ("dressed", "gaussian", "stirap")
_MODES = ("rescale", "truncate")


@dataclass
class ResultRecord:
    """One resolved sweep point: inputs, final fidelity, diagnostics."""

    label: str
    flavor: str
    g: float
    kappa_over_g: float
    gamma_over_g: float
    gammaphi_over_g: float
    delta_t: float
    delta_omega: float
    delta_g: float
    omega0: float | None
    n_steps: int
    duration: float
    fidelity: float
    drift: float
    min_eigenvalue: float | None
    code_version: str = CODE_VERSION

    CSV_HEADER = (
        "label",
        "flavor",
        "g",
        "kappa_over_g",
        "gamma_over_g",
        "gammaphi_over_g",
        "delta_t",
        "delta_omega",
        "delta_g",
        "omega0",
        "n_steps",
        "duration",
        "fidelity",
        "drift",
        "min_eigenvalue",
        "code_version",
    )

    def row(self) -> list:
        d = asdict(self)
        return [d[k] for k in self.CSV_HEADER]


@dataclass(frozen=True)
class SweepSpec:
    """Up to two named axes swept over a base configuration."""

    flavor: str = "gaussian"
    g: float = 30.0
    A: float = 0.5
    noise: NoiseModel = field(default_factory=NoiseModel)
    axes: tuple = ()
    variation: tuple = (0.0, 0.0, 0.0)
    omega0: float | None = None
    n_steps: int = 2000
    mode: str = "rescale"

    def __post_init__(self) -> None:
        if self.flavor not in _FLAVORS:
            raise ValueError(f"flavor must be one of {_FLAVORS}, got {self.flavor!r}")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if len(self.axes) > 2:
            raise ValueError("at most two sweep axes are supported")
        for name, values in self.axes:
            if name not in _AXIS_NAMES:
                raise ValueError(f"unknown axis {name!r}; choose from {sorted(_AXIS_NAMES)}")
            if len(tuple(values)) == 0:
                raise ValueError(f"axis {name!r} has no values")


def _base_job(spec: SweepSpec) -> dict:
    return {
        "label": "",
        "flavor": spec.flavor,
        "g": spec.g,
        "A": spec.A,
        "kappa_over_g": spec.noise.kappa / spec.g,
        "gamma_over_g": spec.noise.gamma / spec.g,
        "gammaphi_over_g": spec.noise.gamma_phi / spec.g,
        "delta_t": spec.variation[0],
        "delta_omega": spec.variation[1],
        "delta_g": spec.variation[2],
        "omega0": spec.omega0,
        "n_steps": spec.n_steps,
        "mode": spec.mode,
    }


_AXIS_TO_KEY = {
    "g": "g",
    "kappa_over_g": "kappa_over_g",
    "gamma_over_g": "gamma_over_g",
    "gammaphi_over_g": "gammaphi_over_g",
    "dT_over_T": "delta_t",
    "dOmega_over_Omega": "delta_omega",
    "dg_over_g": "delta_g",
    "omega0_stirap": "omega0",
}


def build_schedule(
    flavor: str,
    params: ScheduleParams,
    omega0: float | None = None,
) -> PulseSchedule:
    if flavor == "dressed":
        return dressed_pulses(params)
    if flavor == "gaussian":
        return gaussian_fit_pulses(params)
    if flavor == "stirap":
        if omega0 is None:
            raise ValueError("stirap flavor needs omega0")
        return stirap_pulses(omega0, params=params)
    raise ValueError(f"unknown flavor {flavor!r}")


def evaluate_point(job: dict) -> ResultRecord:
    """Run one sweep point described by primitives (worker-safe)."""
    flavor = job["flavor"]
    mode = job.get("mode", "rescale")
    d_t = float(job.get("delta_t", 0.0))
    d_omega = float(job.get("delta_omega", 0.0))
    d_g = float(job.get("delta_g", 0.0))
    if d_t <= -1.0:
        raise ValueError("delta_t must exceed -1")

    if mode == "rescale":
        run_t = 1.0 + d_t
        schedule = build_schedule(flavor, ScheduleParams(T=run_t, A=job.get("A", 0.5)), job.get("omega0"))
    elif mode == "truncate":
        run_t = 1.0 + d_t
        schedule = build_schedule(flavor, ScheduleParams(T=1.0, A=job.get("A", 0.5)), job.get("omega0"))
        schedule = with_duration(schedule, run_t)
    else:
        raise ValueError(f"unknown variation mode {mode!r}")
    if d_omega != 0.0:
        schedule = scaled(schedule, 1.0 + d_omega)

    g_eff = float(job["g"]) * (1.0 + d_g)
    cfg = CouplingConfig(g=g_eff, T=run_t)
    hc = cavity_hamiltonian(cfg)

    def h_fn(t: float) -> np.ndarray:
        return hc + drive_hamiltonian(schedule.qubit_amplitudes(t))

    noise = NoiseModel(
        kappa=job.get("kappa_over_g", 0.0) * g_eff,
        gamma=job.get("gamma_over_g", 0.0) * g_eff,
        gamma_phi=job.get("gammaphi_over_g", 0.0) * g_eff,
    )
    grid = TimeGrid(n_steps=int(job.get("n_steps", 2000)))
    psi0 = basis_state(PSI1)
    if noise.is_closed:
        traj = propagate_schrodinger(h_fn, psi0, grid, duration=run_t)
    else:
        rho0 = np.outer(psi0, psi0.conj())
        traj = propagate_lindblad(h_fn, lindblad_operators(noise), rho0, grid, duration=run_t)

    return ResultRecord(
        label=str(job.get("label", "")),
        flavor=flavor,
        g=float(job["g"]),
        kappa_over_g=float(job.get("kappa_over_g", 0.0)),
        gamma_over_g=float(job.get("gamma_over_g", 0.0)),
        gammaphi_over_g=float(job.get("gammaphi_over_g", 0.0)),
        delta_t=d_t,
        delta_omega=d_omega,
        delta_g=d_g,
        omega0=job.get("omega0"),
        n_steps=grid.n_steps,
        duration=run_t,
        fidelity=fidelity(traj.final_state),
        drift=traj.drift,
        min_eigenvalue=traj.min_eigenvalue,
    )


def _map_jobs(jobs: list[dict], n_jobs: int = 1) -> list[ResultRecord]:
    if n_jobs <= 1 or len(jobs) <= 1:
        return [evaluate_point(j) for j in jobs]
    with multiprocessing.Pool(min(n_jobs, len(jobs))) as pool:
        return pool.map(evaluate_point, jobs)


# ---------------------------------------------------------------------------
# deterministic writers


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_meta(path, name: str, payload: dict) -> None:
    meta = {"schema_version": SCHEMA_VERSION, "code_version": CODE_VERSION, "driver": name}
    meta.update(payload)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(outdir, name: str, records: list[ResultRecord], meta: dict) -> None:
    if outdir is None:
        return
    os.makedirs(outdir, exist_ok=True)
    write_csv(
        os.path.join(outdir, f"{name}.csv"),
        ResultRecord.CSV_HEADER,
        [r.row() for r in records],
    )
    write_meta(os.path.join(outdir, f"{name}.meta.json"), name, meta)


COMPARE_HEADER = ("label", "reference", "computed", "delta", "status")


def _emit_compare(outdir, name: str, comparisons: list[dict]) -> None:
    if outdir is None:
        return
    write_csv(
        os.path.join(outdir, f"{name}_compare.csv"),
        COMPARE_HEADER,
        [
            (c["label"], c["reference"], c["computed"], c["delta"], "pass" if c["passed"] else "FAIL")
            for c in comparisons
        ],
    )


def _compare(label: str, reference: float, computed: float, tol: float) -> dict:
    delta = computed - reference
    return {
        "label": label,
        "reference": reference,
        "computed": computed,
        "delta": delta,
        "tolerance": tol,
        "passed": bool(abs(delta) <= tol),
    }


def _write_trajectory(outdir, name: str, traj: Trajectory, meta: dict, label: str = "") -> None:
    if outdir is None:
        return
    os.makedirs(outdir, exist_ok=True)
    header = ("t", "fidelity") + tuple(f"P{i}" for i in range(1, 10)) + ("PG",)
    rows = [
        (traj.times[i], traj.fidelities[i], *traj.populations[i]) for i in range(len(traj.times))
    ]
    write_csv(os.path.join(outdir, f"{name}.csv"), header, rows)
    write_meta(os.path.join(outdir, f"{name}.meta.json"), name, meta)


# ---------------------------------------------------------------------------
# named drivers


def run_sweep(spec: SweepSpec, outdir=None, jobs: int = 1, name: str = "sweep"):
    """Expand the spec's axes into a grid and evaluate every point."""
    base = _base_job(spec)
    points = [{}]
    for axis_name, values in spec.axes:
        key = _AXIS_TO_KEY[axis_name]
        points = [dict(p, **{key: float(v)}) for p in points for v in values]
    jobs_list = []
    for p in points:
        job = dict(base)
        job.update(p)
        job["label"] = ",".join(f"{k}={v:g}" for k, v in sorted(p.items())) or "base"
        jobs_list.append(job)
    records = _map_jobs(jobs_list, jobs)
    _emit(
        outdir,
        name,
        records,
        {
            "flavor": spec.flavor,
            "g": spec.g,
            "axes": [[n, [float(v) for v in vs]] for n, vs in spec.axes],
            "n_steps": spec.n_steps,
            "mode": spec.mode,
        },
    )
    return records


def run_coupling_sweep(g_values=None, outdir=None, jobs: int = 1, n_steps: int = 2000):
    """Closed-system final fidelity versus the coupling g (gaussian flavor)."""
    if g_values is None:
        g_values = [float(g) for g in range(1, 31)]
    spec = SweepSpec(
        flavor="gaussian", axes=(("g", tuple(g_values)),), n_steps=n_steps
    )
    return run_sweep(spec, outdir, jobs, name="coupling_sweep")


def run_population_trace(outdir=None, g: float = 30.0, n_steps: int = 2000, n_frames: int = 401):
    """Basis-state populations along the headline closed-system run."""
    cfg = CouplingConfig(g=g)
    schedule = gaussian_fit_pulses()
    hc = cavity_hamiltonian(cfg)

    def h_fn(t: float) -> np.ndarray:
        return hc + drive_hamiltonian(schedule.qubit_amplitudes(t))

    traj = propagate_schrodinger(
        h_fn, basis_state(PSI1), TimeGrid(n_steps), duration=1.0, n_frames=n_frames
    )
    _write_trajectory(
        outdir,
        "population_trace",
        traj,
        {"flavor": "gaussian", "g": g, "n_steps": n_steps, "closed_system": True},
    )
    return traj


def run_stirap_comparison(configs=None, outdir=None, jobs: int = 1, n_steps: int = 2000, n_frames: int = 201):
    """Fidelity curves: the protocol at g = 30/T versus the STIRAP baseline."""
    if configs is None:
        configs = [(omega0, g) for omega0, g, _, _ in STIRAP_REFERENCE] + [STIRAP_STRONG]
    curves: dict[str, Trajectory] = {}
    records: list[ResultRecord] = []

    def trace(label, flavor, g, omega0=None):
        cfg = CouplingConfig(g=g)
        schedule = build_schedule(flavor, ScheduleParams(), omega0)
        hc = cavity_hamiltonian(cfg)
        h_fn = lambda t: hc + drive_hamiltonian(schedule.qubit_amplitudes(t))
        traj = propagate_schrodinger(
            h_fn, basis_state(PSI1), TimeGrid(n_steps), duration=1.0, n_frames=n_frames
        )
        curves[label] = traj
        records.append(
            ResultRecord(
                label=label,
                flavor=flavor,
                g=g,
                kappa_over_g=0.0,
                gamma_over_g=0.0,
                gammaphi_over_g=0.0,
                delta_t=0.0,
                delta_omega=0.0,
                delta_g=0.0,
                omega0=omega0,
                n_steps=n_steps,
                duration=1.0,
                fidelity=fidelity(traj.final_state),
                drift=traj.drift,
                min_eigenvalue=None,
            )
        )

    trace("protocol_g30", "gaussian", 30.0)
    for omega0, g in configs:
        trace(f"stirap_{omega0:g}_{g:g}", "stirap", float(g), float(omega0))

    if outdir is not None:
        os.makedirs(outdir, exist_ok=True)
        rows = []
        for label, traj in curves.items():
            rows.extend((label, traj.times[i], traj.fidelities[i]) for i in range(len(traj.times)))
        write_csv(os.path.join(outdir, "stirap_comparison.csv"), ("label", "t", "fidelity"), rows)
        write_meta(
            os.path.join(outdir, "stirap_comparison.meta.json"),
            "stirap_comparison",
            {"configs": [[float(a), float(b)] for a, b in configs], "n_steps": n_steps},
        )
        write_csv(
            os.path.join(outdir, "stirap_comparison_final.csv"),
            ResultRecord.CSV_HEADER,
            [r.row() for r in records],
        )
    return records, curves


def run_decoherence_grid(axes=None, outdir=None, jobs: int = 1, n_steps: int = 2000):
    """One-dimensional decoherence scans around the closed-system baseline."""
    if axes is None:
        values = tuple(np.linspace(0.0, 1.0e-2, 6))
        axes = [
            ("kappa_over_g", values),
            ("gamma_over_g", values),
            ("gammaphi_over_g", tuple(np.linspace(0.0, 1.0e-3, 6))),
        ]
    records = []
    for axis_name, values in axes:
        spec = SweepSpec(flavor="gaussian", axes=((axis_name, tuple(values)),), n_steps=n_steps)
        records.extend(run_sweep(spec, None, jobs, name="decoherence_grid"))
    _emit(
        outdir,
        "decoherence_grid",
        records,
        {"axes": [[n, [float(v) for v in vs]] for n, vs in axes], "n_steps": n_steps, "g": 30.0},
    )
    return records


def run_reference_decoherence_table(outdir=None, jobs: int = 1, n_steps: int = 2000):
    """All 17 reference decoherence rows plus the side-by-side comparison."""
    jobs_list = []
    for kog, gog, pog, _ in TABLE1_REFERENCE:
        jobs_list.append(
            {
                "label": f"k{kog:g}_g{gog:g}_p{pog:g}",
                "flavor": "gaussian",
                "g": 30.0,
                "kappa_over_g": kog,
                "gamma_over_g": gog,
                "gammaphi_over_g": pog,
                "n_steps": n_steps,
            }
        )
    records = _map_jobs(jobs_list, jobs)
    comparisons = [
        _compare(rec.label, ref[3], rec.fidelity, FIDELITY_TOLERANCE)
        for rec, ref in zip(records, TABLE1_REFERENCE)
    ]
    _emit(outdir, "table1", records, {"rows": len(records), "g": 30.0, "n_steps": n_steps})
    _emit_compare(outdir, "table1", comparisons)
    return records, comparisons


def run_dephasing_comparison(values=None, outdir=None, jobs: int = 1, n_steps: int = 2000):
    """Protocol versus STIRAP baseline as dephasing grows (kappa = gamma = 0).

    The baseline uses (omega0, g) = (50, 150)/T, the strongest configuration
    of the comparison set; this choice is recorded in the metadata.
    """
    if values is None:
        values = tuple(np.linspace(0.0, 1.0e-3, 6))
    jobs_list = []
    for v in values:
        jobs_list.append(
            {
                "label": f"protocol_p{v:g}",
                "flavor": "gaussian",
                "g": 30.0,
                "gammaphi_over_g": float(v),
                "n_steps": n_steps,
            }
        )
    for v in values:
        jobs_list.append(
            {
                "label": f"stirap_p{v:g}",
                "flavor": "stirap",
                "g": STIRAP_STRONG[1],
                "gammaphi_over_g": float(v),
                "omega0": STIRAP_STRONG[0],
                "n_steps": n_steps,
            }
        )
    records = _map_jobs(jobs_list, jobs)
    _emit(
        outdir,
        "dephasing_comparison",
        records,
        {
            "gammaphi_over_g": [float(v) for v in values],
            "n_steps": n_steps,
            "assumption": "baseline pair (omega0, g) = (50, 150)/T, the only "
            "configuration of the comparison set that clears 0.99 when closed",
        },
    )
    return records


def run_variation_grid(rows=None, outdir=None, jobs: int = 1, n_steps: int = 2000, mode: str = "rescale", name: str = "table2"):
    """Fidelity under signed 10% errors on duration, amplitude, and coupling.

    mode="rescale" re-parameterizes the waveforms by the erroneous duration
    T' (the default interpretation); mode="truncate" keeps the nominal
    waveforms and cuts or extends the run window instead. The comparison
    against the reference rows is reported honestly; see the README for why
    most rows land outside the band under either mode.
    """
    if rows is None:
        rows = [(dt, do, dg) for dt, do, dg, _ in TABLE2_REFERENCE]
        refs = [r[3] for r in TABLE2_REFERENCE]
    else:
        refs = None
    jobs_list = []
    for dt, do, dg in rows:
        jobs_list.append(
            {
                "label": f"dT{dt:+g}_dO{do:+g}_dg{dg:+g}",
                "flavor": "gaussian",
                "g": 30.0,
                "delta_t": float(dt),
                "delta_omega": float(do),
                "delta_g": float(dg),
                "n_steps": n_steps,
                "mode": mode,
            }
        )
    records = _map_jobs(jobs_list, jobs)
    comparisons = None
    if refs is not None:
        comparisons = [
            _compare(rec.label, ref, rec.fidelity, FIDELITY_TOLERANCE)
            for rec, ref in zip(records, refs)
        ]
        _emit_compare(outdir, name, comparisons)
    _emit(outdir, name, records, {"mode": mode, "rows": len(records), "n_steps": n_steps})
    return records, comparisons


def run_variation_scan(outdir=None, jobs: int = 1, n_steps: int = 2000, mode: str = "rescale"):
    """Single-axis error scans plus the sign-correlation quad at dg = 0."""
    deltas = [-0.10, -0.05, 0.0, 0.05, 0.10]
    rows = [(d, 0.0, 0.0) for d in deltas]
    rows += [(0.0, d, 0.0) for d in deltas]
    rows += [(0.0, 0.0, d) for d in deltas]
    rows += [(a, b, 0.0) for a in (0.10, -0.10) for b in (0.10, -0.10)]
    records, _ = run_variation_grid(
        rows=rows, outdir=outdir, jobs=jobs, n_steps=n_steps, mode=mode, name="variation_scan"
    )
    return records


def run_realistic_parameters(outdir=None, n_steps: int = 2000):
    """Single open-system run at experimentally quoted rate ratios."""
    kog, gog, pog = REALISTIC_RATIOS
    record = evaluate_point(
        {
            "label": "realistic",
            "flavor": "gaussian",
            "g": 30.0,
            "kappa_over_g": kog,
            "gamma_over_g": gog,
            "gammaphi_over_g": pog,
            "n_steps": n_steps,
        }
    )
    comparison = _compare("realistic", REALISTIC_REFERENCE, record.fidelity, FIDELITY_TOLERANCE)
    _emit(outdir, "realistic", [record], {"ratios": list(REALISTIC_RATIOS), "n_steps": n_steps})
    _emit_compare(outdir, "realistic", [comparison])
    return record, comparison


def run_effective_model(params: ScheduleParams | None = None, n_steps: int = 2000):
    """Three-level effective dynamics with the exact corrected controls.

    Returns (final fidelity, max |P_phi0 - sin^2 mu| over stored frames); the
    shortcut is exact at this level, so the fidelity should be ~1 and the
    dark-subspace population should ride sin^2 mu tightly.
    """
    p = params or ScheduleParams()

    def h_fn(t: float) -> np.ndarray:
        c = modified_controls(t, p)
        return effective_hamiltonian(c.omega_a, c.omega_b)

    traj = propagate_schrodinger(
        h_fn, basis_state(PSI1), TimeGrid(n_steps), duration=p.T, n_frames=500
    )
    phi0 = dark_state()
    max_dev = 0.0
    for t, state in zip(traj.times, traj.states):
        _, _, mu, _ = schedule_angles(t, p)
        pop = abs(np.vdot(phi0, state)) ** 2
        max_dev = max(max_dev, abs(pop - math.sin(mu) ** 2))
    return fidelity(traj.final_state), max_dev
