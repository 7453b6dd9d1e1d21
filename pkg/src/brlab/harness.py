"""Experiment orchestration: flat-text configs, validation, artifacts.

A config is a flat ``key = value`` text file ('#' starts a comment).  Keys:

    experiment        decompose | kernel-decay | omega | atoms | weak-type |
                      lp-bound | lemma-checks    (the CLI positional wins)
    gauge             euclidean | ell_<m> | superellipsoid_<m1>_<m2>_<m3>
    n                 ambient dimension (2 or 3)
    p                 Lebesgue/Hardy exponent in (0, 1)
    delta             float, or "critical", or "critical+<x>"
    n_side            grid side count (power of two)
    half_width        physical box half width L
    k_min, k_max      dyadic shell range for decomposition studies
    t_per_octave      sup-grid density (>= 8)
    boundary_samples  surface quadrature size
    theta_samples     omega profile direction count
    seeds             atom count (int) or comma list of seeds
    scales            comma list of atom radii
    seed              master RNG seed
    threads           fft worker count
    out               output directory

Each run writes one directory: ``report.json``, ``curves/*.csv``,
``fields/*.bin``, and ``run_record.json`` with config hash and artifact
checksums.  All randomness flows from the seed, so identical configs rerun
byte-identically.
"""

from __future__ import annotations

import hashlib
import json
import shutil
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fourier, hardy, riesz
from .decomp import AngularPartition, DyadicBump, PieceMultiplier, assemble_radial, radial_pieces
from .fitting import geometric_grid, log2_slope
from .gauge import Gauge, GaugeError, auxiliary_index, critical_index
from .surface import (ConvexSurface, angle_height_ratio, cap_comparability_report,
                      cap_doubling_report, omega_transfer_report,
                      support_shift_report)

__all__ = ["EXPERIMENTS", "ExperimentConfig", "RunRecord", "parse_config",
           "validate", "run"]

VERSION = "0.1.0"

EXPERIMENTS = ("decompose", "kernel-decay", "omega", "atoms", "weak-type",
               "lp-bound", "lemma-checks")

_DEFAULTS = {
    "gauge": "euclidean",
    "n": 2,
    "p": 2.0 / 3.0,
    "delta": "critical",
    "n_side": 1024,
    "half_width": None,
    "k_min": 2,
    "k_max": 6,
    "t_per_octave": 8,
    "boundary_samples": 2 ** 16,
    "theta_samples": 512,
    "seeds": 4,
    "scales": (0.25, 1.0, 4.0),
    "seed": 0,
    "threads": 1,
    "out": "out",
}


def parse_config(text: str) -> dict:
    """Parse flat key = value lines; later keys override earlier ones."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno} is not 'key = value': {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


@dataclass
class ExperimentConfig:
    experiment: str
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path, experiment: str | None = None) -> "ExperimentConfig":
        raw = parse_config(Path(path).read_text())
        exp = experiment or raw.get("experiment", "")
        return cls(experiment=exp, raw=raw)

    # typed getters -----------------------------------------------------------

    def get(self, key, cast=str):
        if key in self.raw:
            return cast(self.raw[key])
        default = _DEFAULTS.get(key)
        return default if default is None else cast(default)

    @property
    def n(self) -> int:
        return self.get("n", int)

    @property
    def p(self) -> float:
        return self.get("p", float)

    @property
    def seed(self) -> int:
        return self.get("seed", int)

    @property
    def gauge_name(self) -> str:
        return self.get("gauge")

    def gauge(self) -> Gauge:
        return _parse_gauge(self.gauge_name, self.n)

    def delta(self) -> float:
        spec = str(self.get("delta"))
        crit = critical_index(self.p, self.n).delta
        if spec == "critical":
            return crit
        if spec.startswith("critical+"):
            return crit + float(spec[len("critical+"):])
        return float(spec)

    def seeds(self):
        raw = self.raw.get("seeds")
        if raw is None:
            return list(range(int(_DEFAULTS["seeds"])))
        if "," in raw:
            return [int(s) for s in raw.split(",")]
        return list(range(int(raw)))

    def scales(self):
        raw = self.raw.get("scales")
        if raw is None:
            return list(_DEFAULTS["scales"])
        return [float(s) for s in raw.split(",")]

    def canonical_text(self) -> str:
        items = dict(self.raw)
        items["experiment"] = self.experiment
        return "\n".join(f"{k} = {items[k]}" for k in sorted(items))


def _parse_gauge(name: str, n: int) -> Gauge:
    if name == "euclidean":
        return Gauge.euclidean(n)
    if name.startswith("ell_"):
        m = int(name.split("_", 1)[1])
        return Gauge.ell(m, n)
    if name.startswith("superellipsoid_"):
        powers = tuple(int(x) for x in name.split("_")[1:])
        return Gauge.superellipsoid(powers)
    raise GaugeError(f"unknown gauge descriptor {name!r}")


def validate(config: ExperimentConfig) -> list[str]:
    """Return violations; empty list means the config is runnable."""
    v = []
    if config.experiment not in EXPERIMENTS:
        v.append(f"unknown experiment {config.experiment!r}; "
                 f"choose one of {', '.join(EXPERIMENTS)}")
        return v
    n = config.n
    if n not in (2, 3):
        v.append(f"n={n}: surfaces and grids are implemented for n in {{2, 3}}")
    p = config.p
    if config.experiment in ("weak-type", "lp-bound", "atoms") and not 0 < p < 1:
        v.append(f"p={p}: p in (0,1) is required by the mapping hypotheses")
    try:
        gauge = config.gauge()
        if config.experiment in ("weak-type", "lp-bound") and not gauge.dilation.is_isotropic:
            v.append("boundedness experiments assume isotropic dilations")
    except GaugeError as exc:
        v.append(f"gauge {config.gauge_name!r}: {exc}")
        gauge = None
    if config.experiment == "lp-bound" and 0 < p < 1:
        crit = critical_index(p, n).delta
        try:
            delta = config.delta()
        except (ValueError, GaugeError) as exc:
            v.append(f"delta: {exc}")
            delta = None
        if delta is not None and delta <= crit:
            v.append(
                f"delta={delta:.4g} <= critical index {crit:.4g}: the "
                "strong-type bound requires delta > n(1/p - 1/2) - 1/2")
    n_side = config.get("n_side", int)
    if n_side & (n_side - 1):
        v.append(f"n_side={n_side} must be a power of two")
    mem_gb = (n_side ** n) * 16 * 8 / 2 ** 30
    if mem_gb > 4.0:
        suggested = n_side
        while (suggested ** n) * 16 * 8 / 2 ** 30 > 4.0:
            suggested //= 2
        v.append(f"n={n} with n_side={n_side} needs ~{mem_gb:.0f} GiB of "
                 f"workspace; use n_side <= {suggested}")
    if config.get("t_per_octave", int) < 8:
        v.append("t_per_octave must be at least 8")
    return v


@dataclass
class RunRecord:
    config_hash: str
    version: str
    experiment: str
    wall_time: float
    out_dir: str
    artifacts: dict

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True, indent=2)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(x)) for x in row))
    path.write_text("\n".join(lines) + "\n")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def run(config: ExperimentConfig, out_dir=None) -> RunRecord:
    """Execute one experiment, writing artifacts under its own directory.

    Partial outputs are removed if the experiment fails.
    """
    violations = validate(config)
    if violations:
        raise GaugeError("invalid config: " + "; ".join(violations))
    fourier.FFT_WORKERS = max(1, config.get("threads", int))
    out = Path(out_dir or config.get("out"))
    out.mkdir(parents=True, exist_ok=True)
    (out / "curves").mkdir(exist_ok=True)
    (out / "fields").mkdir(exist_ok=True)
    start = time.time()
    try:
        runner = _RUNNERS[config.experiment]
        report = runner(config, out)
    except Exception:
        shutil.rmtree(out, ignore_errors=True)
        raise
    report["experiment"] = config.experiment
    report["gauge"] = config.gauge_name
    report["seed"] = config.seed
    _write_json(out / "report.json", report)
    artifacts = {}
    for path in sorted(out.rglob("*")):
        if path.is_file() and path.name != "run_record.json":
            artifacts[str(path.relative_to(out))] = _sha256(path)
    record = RunRecord(
        config_hash=hashlib.sha256(config.canonical_text().encode()).hexdigest(),
        version=VERSION,
        experiment=config.experiment,
        wall_time=time.time() - start,
        out_dir=str(out),
        artifacts=artifacts,
    )
    (out / "run_record.json").write_text(record.to_json() + "\n")
    return record


# -- experiment runners --------------------------------------------------------


def _surface_for(config: ExperimentConfig, samples=None) -> ConvexSurface:
    return ConvexSurface.from_gauge(config.gauge(),
                                    samples or config.get("boundary_samples", int))


def _run_decompose(config: ExperimentConfig, out: Path) -> dict:
    bump = DyadicBump()
    probe = np.concatenate([geometric_grid(2.0 ** -20, 2.0 ** 20, 4),
                            np.linspace(2.0 ** -20, 4.0, 10 ** 5)])
    defect = bump.partition_defect(probe)

    delta = config.delta() if config.raw.get("delta") else 1.5
    k_max = config.get("k_max", int)
    grid = fourier.GridSpec(n=config.n, n_side=config.get("n_side", int),
                            half_width=config.get("half_width", float)
                            if config.raw.get("half_width") else 1.25)
    gauge = config.gauge()
    rho = riesz.gauge_on_grid(gauge, grid)
    total = assemble_radial(rho, delta, k_max)
    target = np.where(1.0 - rho > 0, 1.0 - rho, 0.0) ** delta
    recon_err = float(np.max(np.abs(total - target)))

    surface = _surface_for(config)
    counts = []
    identity_worst = 0.0
    rng = np.random.default_rng(config.seed)
    angles = rng.uniform(0, 2 * np.pi, 10 ** 4)
    zeta = surface.gauge.boundary_point(
        np.stack([np.cos(angles), np.sin(angles)], axis=-1))
    for k in range(1, 11):
        part = AngularPartition(surface, k)
        counts.append((k, part.size))
        identity_worst = max(identity_worst, part.identity_defect(zeta))
    slope = log2_slope([k for k, _ in counts[1:]], [c for _, c in counts[1:]])
    _write_csv(out / "curves" / "partition_counts.csv", ["k", "count"], counts)
    return {
        "bump_partition_defect": defect,
        "reconstruction_error": recon_err,
        "reconstruction_bound": 2.0 ** (-k_max * delta) + 1e-10,
        "partition_identity_defect": identity_worst,
        "count_slope": slope,
        "delta": delta,
        "k_max": k_max,
    }


def _run_kernel_decay(config: ExperimentConfig, out: Path) -> dict:
    gauge = config.gauge()
    surface = _surface_for(config)
    delta = config.delta() if config.raw.get("delta") else 1.5
    k_range = range(config.get("k_min", int), config.get("k_max", int) + 1)
    n_side = config.get("n_side", int)
    rows = []
    reports = {}
    p = config.p
    crit = critical_index(p, config.n).delta
    p_aux = auxiliary_index(delta, config.n) if delta > crit else None
    pieces = radial_pieces(delta, max(k_range))
    saved = False
    for k in k_range:
        part = AngularPartition(surface, k)
        piece = PieceMultiplier(pieces[k], part, 0)
        grid = fourier.GridSpec(n=config.n, n_side=n_side,
                                half_width=np.pi * 2.0 ** (k + 3))
        bundle = fourier.synthesize_piece_kernel(piece, grid)
        rep = fourier.decay_report(bundle)
        if p_aux is not None:
            rep["envelope"] = fourier.envelope_report(bundle, p_aux)
        reports[str(k)] = rep
        rows.append((k, rep["sup_abs"], rep["normalized_constant"],
                     rep["width_ratio"]))
        if not saved:
            fourier.write_field(bundle.field, out / "fields" / f"kernel_k{k}.bin")
            saved = True
    ks = [r[0] for r in rows]
    slope = log2_slope(ks, [r[1] for r in rows])
    _write_csv(out / "curves" / "kernel_decay.csv",
               ["k", "sup_abs", "normalized_constant", "width_ratio"], rows)
    return {
        "delta": delta,
        "p_aux": p_aux,
        "per_k": reports,
        "sup_slope": slope,
        "predicted_sup_slope": -(delta + 1.0 + (config.n - 1) / 2.0),
    }


def _run_omega(config: ExperimentConfig, out: Path) -> dict:
    surface = _surface_for(config)
    n_theta = config.get("theta_samples", int)
    angles = (np.arange(n_theta) + 0.5) * (2 * np.pi / n_theta)
    profile = surface.omega_profile(angles)
    dist = surface.distance_to_degeneracy(profile.angles)
    _write_csv(out / "curves" / "omega.csv", ["theta", "omega", "dist_to_N"],
               zip(profile.angles, profile.values, dist))
    return {
        "omega_min": float(np.min(profile.values)),
        "omega_max": float(np.max(profile.values)),
        "integral_p06": surface.omega_integral(profile, 0.6),
        "integral_p09": surface.omega_integral(profile, 0.9),
        "edge_saturated_fraction": float(np.mean(profile.edge_saturated)),
        "degenerate_normal_count": int(surface.degenerate_normal_angles().size),
    }


def _run_atoms(config: ExperimentConfig, out: Path) -> dict:
    n = config.n
    p = config.p
    mu = riesz.weak_moment_order(p, n)
    records = []
    saved = False
    for scale in config.scales():
        grid = riesz.default_atom_grid(scale, n)
        for seed in config.seeds():
            atom = hardy.make_atom(grid, p, mu, np.zeros(n), scale,
                                   seed + config.seed)
            checks = atom.verify()
            records.append({"seed": seed, "scale": scale, **checks})
            if not saved:
                fourier.write_field(atom.field, out / "fields" / "atom0.bin")
                saved = True
    return {
        "p": p,
        "mu": mu,
        "count": len(records),
        "all_ok": all(r["support_ok"] and r["sup_ok"] and r["moments_ok"]
                      for r in records),
        "records": records,
    }


def _run_weak_type(config: ExperimentConfig, out: Path) -> dict:
    gauge = config.gauge()
    surface = _surface_for(config)
    profile = surface.omega_profile()
    report = riesz.weak_type_experiment(
        gauge, profile, config.p,
        seeds=[s + config.seed for s in config.seeds()],
        scales=tuple(config.scales()),
        per_octave=config.get("t_per_octave", int),
        n_side=config.get("n_side", int))
    rows = [(r["seed"], r["scale"], r["quasinorm_p"], r["inside_constant"],
             r["omega_envelope_constant"]) for r in report["records"]]
    _write_csv(out / "curves" / "per_atom_constants.csv",
               ["seed", "scale", "quasinorm_p", "inside_constant",
                "envelope_constant"], rows)
    return report


def _run_lp_bound(config: ExperimentConfig, out: Path) -> dict:
    gauge = config.gauge()
    delta = config.delta()
    report = riesz.strong_type_experiment(
        gauge, config.p, delta,
        seeds=[s + config.seed for s in config.seeds()],
        scales=tuple(config.scales()),
        per_octave=config.get("t_per_octave", int),
        n_side=config.get("n_side", int))
    surface = _surface_for(config)
    k_lo = config.get("k_min", int)
    k_hi = min(config.get("k_max", int), 4)
    pieces = riesz.piece_decay_study(surface, config.p, delta,
                                     range(k_lo, k_hi + 1), seed=config.seed)
    report["piece_decay"] = pieces
    rows = [(int(k), m) for k, m in pieces["per_k_mass_p"].items()]
    _write_csv(out / "curves" / "per_k_mass.csv", ["k", "outside_mass_p"], rows)
    return report


def _run_lemma_checks(config: ExperimentConfig, out: Path) -> dict:
    surface = _surface_for(config)
    rng = np.random.default_rng(config.seed)
    ratios = {}
    for m in (2, 3, 4):
        sweep = [angle_height_ratio(1.0, m, th) for th in (0.2, 0.1, 0.05, 0.02)]
        ratios[str(m)] = sweep
    xs, ys = _admissible_pairs(rng, surface.n, 200)
    shift = support_shift_report(surface, xs, ys)
    profile = surface.omega_profile()
    transfer = omega_transfer_report(surface, profile, xs, ys)
    doubling = cap_doubling_report(surface, rng)
    compare = cap_comparability_report(surface, rng)
    return {
        "angle_height_ratios": ratios,
        "support_shift_max": shift["max_scaled_gap"],
        "direction_ratio_max": shift["max_direction_ratio"],
        "omega_transfer_max": transfer["max_ratio"],
        "doubling": doubling,
        "comparability": compare,
    }


def _admissible_pairs(rng, n, count, s_max=1.0):
    """Random (x, y) with |y| < s <= 1 and |x| > 2s."""
    s = rng.uniform(0.2, s_max, count)
    y_dir = rng.normal(size=(count, n))
    y_dir /= np.linalg.norm(y_dir, axis=1, keepdims=True)
    y = y_dir * (s * rng.uniform(0.1, 0.999, count))[:, None]
    x_dir = rng.normal(size=(count, n))
    x_dir /= np.linalg.norm(x_dir, axis=1, keepdims=True)
    x = x_dir * (s * rng.uniform(2.001, 40.0, count))[:, None]
    return x, y


_RUNNERS = {
    "decompose": _run_decompose,
    "kernel-decay": _run_kernel_decay,
    "omega": _run_omega,
    "atoms": _run_atoms,
    "weak-type": _run_weak_type,
    "lp-bound": _run_lp_bound,
    "lemma-checks": _run_lemma_checks,
}
