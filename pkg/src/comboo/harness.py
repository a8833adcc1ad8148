"""Experiment configuration, multi-seed orchestration and file output."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
import os
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from comboo.engine import BetaSchedule, MODES, RunConfig, run
from comboo.errors import ComboError, ConfigError, InputError, NumericalError
from comboo.gp import RBF, Matern, Tanimoto
from comboo.metrics import (
    compute_series,
    metric_columns,
    pad_series,
    random_search_run,
    summarize,
)
from comboo.problems import (
    REGISTRY,
    ProblemSpec,
    candidate_grid,
    get_problem,
    load_tabular_problem,
    true_pareto_hv,
)
from comboo.scalarization import hypervolume_exact, hypervolume_mc

log = logging.getLogger(__name__)

OUTPUT_ENV = "COMBOO_OUTPUT_DIR"
METHODS = ("comboo", "random")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_DECLARED_FEASIBLE = 4

DEFAULT_HYPER_GRID = {
    "amplitudes": [0.01, 0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0],
    "lengthscales": [0.05, 0.1, 0.2, 0.4, 0.8],
}


@dataclass
class ExperimentConfig:
    """Fully resolved experiment description.

    :func:`parse_config` fills every field, so a serialized config (the
    run manifest) reproduces the experiment on its own.
    """

    problem: str
    T: int = 60
    n_init: int = 10
    seeds: list = field(default_factory=lambda: list(range(10)))
    base_seed: int = 0
    z: list = field(default_factory=list)
    resolution: Any = None
    candidates_path: Optional[str] = None
    table_path: Optional[str] = None
    overrides: dict = field(default_factory=dict)
    kernel_f: list = field(default_factory=list)
    kernel_g: list = field(default_factory=list)
    beta: Any = field(default_factory=dict)
    delta: float = 0.1
    hyper_grid: Optional[dict] = None
    mode: str = "discrete"
    require_feasible_init: bool = False
    continue_after_declaration: bool = False
    normalize_metrics: bool = False
    mc_samples: int = 10000
    grid_cap: int = 64
    c_tau: float = 1.0
    baselines: list = field(default_factory=list)
    output_dir: Optional[str] = None


_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}
_OVERRIDE_KEYS = {"noise_sd_f", "noise_sd_g", "bounds", "thresholds", "known_feasible"}


_KERNEL_KEYS = {
    "matern": {"nu", "lengthscales", "amplitude"},
    "rbf": {"amplitude", "lengthscale_sq"},
    "tanimoto": {"amplitude"},
}


def _kernel_from_dict(spec: dict):
    spec = dict(spec)
    kind = spec.pop("type", None)
    if kind not in _KERNEL_KEYS:
        raise ConfigError(f"kernel.type must be matern, rbf or tanimoto, got {kind!r}")
    unknown = set(spec) - _KERNEL_KEYS[kind]
    if unknown:
        raise ConfigError(f"kernel: unknown keys {sorted(unknown)}")
    try:
        if kind == "matern":
            ls = spec.get("lengthscales", 1.0)
            ls = tuple(float(v) for v in ls) if isinstance(ls, list) else float(ls)
            return Matern(float(spec.get("nu", 2.5)), ls, float(spec.get("amplitude", 1.0)))
        if kind == "rbf":
            return RBF(float(spec.get("amplitude", 1.0)), float(spec.get("lengthscale_sq", 1.0)))
        return Tanimoto(float(spec.get("amplitude", 1.0)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"kernel: {exc}") from None


def _kernel_list(value, n: int, key: str) -> list:
    if isinstance(value, dict):
        value = [value] * n
    if not isinstance(value, list) or len(value) != n:
        raise ConfigError(f"{key} must be a kernel object or a list of {n}")
    for v in value:
        if not isinstance(v, dict):
            raise ConfigError(f"{key} entries must be objects")
        _kernel_from_dict(v)
    return [dict(v) for v in value]


def _beta_from_dict(spec: dict, delta: float) -> BetaSchedule:
    spec = dict(spec)
    unknown = set(spec) - {"kind", "coef", "scale", "delta"}
    if unknown:
        raise ConfigError(f"beta: unknown keys {sorted(unknown)}")
    try:
        return BetaSchedule(
            kind=spec.get("kind", "experimental"),
            coef=float(spec.get("coef", 0.4)),
            scale=float(spec.get("scale", 2.0)),
            delta=float(spec.get("delta", delta)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"beta: {exc}") from None


def build_problem(cfg: ExperimentConfig) -> ProblemSpec:
    if cfg.problem == "tabular":
        if not cfg.table_path:
            raise ConfigError("problem 'tabular' needs table_path")
        try:
            problem = load_tabular_problem(cfg.table_path, name="tabular")
        except (OSError, InputError) as exc:
            raise ConfigError(f"table_path: {exc}") from None
    else:
        problem = get_problem(cfg.problem)
    ov = cfg.overrides
    if "noise_sd_f" in ov or "noise_sd_g" in ov:
        problem = problem.with_noise(ov.get("noise_sd_f"), ov.get("noise_sd_g"))
    if "bounds" in ov:
        b = np.asarray(ov["bounds"], dtype=float)
        if b.shape != (problem.d, 2) or np.any(b[:, 0] >= b[:, 1]):
            raise ConfigError(f"overrides.bounds must be {problem.d} [lo, hi] pairs with lo < hi")
        problem = dataclasses.replace(problem, bounds=b)
    if "thresholds" in ov:
        if problem.thresholds is None:
            raise ConfigError(f"problem {problem.name!r} has no threshold constraints")
        thr = np.asarray(ov["thresholds"], dtype=float)
        if thr.shape != (problem.c,):
            raise ConfigError(f"overrides.thresholds needs {problem.c} values")
        base = problem.evaluator

        def evaluator(X, _base=base, _thr=thr):
            F, _ = _base(X)
            return F, F - _thr

        problem = dataclasses.replace(problem, evaluator=evaluator, thresholds=tuple(thr))
    if "known_feasible" in ov:
        problem = dataclasses.replace(problem, known_feasible=bool(ov["known_feasible"]))
    return problem


def _json_error(exc: json.JSONDecodeError) -> ConfigError:
    return ConfigError(f"config is not valid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON config, filling problem defaults.

    Raises :class:`ConfigError` on malformed JSON (with line and column),
    unknown keys, or invalid values.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _json_error(exc) from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _FIELDS - {"kernel"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "problem" not in raw:
        raise ConfigError("config needs a 'problem' key")
    cfg = ExperimentConfig(problem=str(raw["problem"]))

    bad_ov = set(raw.get("overrides", {})) - _OVERRIDE_KEYS
    if bad_ov:
        raise ConfigError(f"unknown override keys: {sorted(bad_ov)}")
    cfg.overrides = dict(raw.get("overrides", {}))
    cfg.table_path = raw.get("table_path")
    problem = build_problem(cfg)
    dflt = problem.defaults

    def get(key, default):
        return raw[key] if key in raw else default

    def as_int(key, default, lo=None):
        v = get(key, default)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{key} must be an integer")
        if lo is not None and v < lo:
            raise ConfigError(f"{key} must be >= {lo}")
        return v

    def as_bool(key, default):
        v = get(key, default)
        if not isinstance(v, bool):
            raise ConfigError(f"{key} must be true or false")
        return v

    cfg.T = as_int("T", 60, 0)
    cfg.n_init = as_int("n_init", dflt.get("n_init", 10), 0)
    cfg.base_seed = as_int("base_seed", 0)
    seeds = get("seeds", 10)
    if isinstance(seeds, int) and not isinstance(seeds, bool):
        if seeds < 1:
            raise ConfigError("seeds must be >= 1")
        seeds = list(range(seeds))
    if not (isinstance(seeds, list) and seeds and all(isinstance(s, int) for s in seeds)):
        raise ConfigError("seeds must be a positive count or a nonempty list of integers")
    if len(set(seeds)) != len(seeds):
        raise ConfigError("seeds must be distinct")
    cfg.seeds = list(seeds)

    z = get("z", dflt.get("z"))
    if z is None:
        raise ConfigError(f"problem {problem.name!r} has no default z; set 'z'")
    try:
        z = [float(v) for v in z]
    except (TypeError, ValueError):
        raise ConfigError("z must be a list of numbers") from None
    if len(z) != problem.m or not all(math.isfinite(v) for v in z):
        raise ConfigError(f"z must have {problem.m} finite entries")
    cfg.z = z

    cfg.candidates_path = get("candidates_path", None)
    res = get("resolution", None if problem.is_discrete else dflt.get("resolution"))
    if not problem.is_discrete and cfg.candidates_path is None:
        if res is None:
            raise ConfigError("resolution is required for this problem")
        if isinstance(res, list):
            if len(res) != problem.d or not all(isinstance(r, int) and r >= 2 for r in res):
                raise ConfigError(f"resolution must be an int >= 2 or a list of {problem.d}")
        elif isinstance(res, bool) or not isinstance(res, int) or res < 2:
            raise ConfigError("resolution must be >= 2")
    cfg.resolution = res

    kernel = get("kernel", None)
    base_kernel = kernel if kernel is not None else dflt.get("kernel", {"type": "matern"})
    if kernel is not None and not isinstance(kernel, dict):
        raise ConfigError("kernel must be an object")
    cfg.kernel_f = _kernel_list(get("kernel_f", base_kernel), problem.m, "kernel_f")
    cfg.kernel_g = _kernel_list(get("kernel_g", base_kernel), problem.c, "kernel_g")

    delta = get("delta", 0.1)
    if not isinstance(delta, (int, float)) or isinstance(delta, bool) or not (0 < delta < 1):
        raise ConfigError("delta must be in (0,1)")
    cfg.delta = float(delta)
    beta = get("beta", dflt.get("beta", {"kind": "experimental", "coef": 0.4}))
    if isinstance(beta, dict):
        b = _beta_from_dict(beta, cfg.delta)
        cfg.beta = {"kind": b.kind, "coef": b.coef, "scale": b.scale, "delta": b.delta}
    elif isinstance(beta, list):
        cfg.beta = []
        for entry in beta:
            if not isinstance(entry, dict):
                raise ConfigError("beta list entries must be objects")
            b = _beta_from_dict(entry, cfg.delta)
            cfg.beta.append({"kind": b.kind, "coef": b.coef, "scale": b.scale, "delta": b.delta})
    else:
        raise ConfigError("beta must be an object or a list of objects")

    default_grid = dflt.get("hyper_grid", DEFAULT_HYPER_GRID)
    grid = get("hyper_grid", default_grid)
    if grid is not None:
        if not isinstance(grid, dict) or set(grid) - {"amplitudes", "lengthscales"}:
            raise ConfigError("hyper_grid must be null or an object with amplitudes/lengthscales")
        try:
            grid = {k: [float(v) for v in grid.get(k, [])] for k in ("amplitudes", "lengthscales")}
        except (TypeError, ValueError):
            raise ConfigError("hyper_grid values must be lists of numbers") from None
        if any(v <= 0 for vals in grid.values() for v in vals):
            raise ConfigError("hyper_grid values must be > 0")
    cfg.hyper_grid = grid

    cfg.mode = get("mode", "discrete")
    if cfg.mode not in MODES:
        raise ConfigError(f"mode must be one of {list(MODES)}")
    if cfg.mode == "discretized-continuous" and problem.bounds is None:
        raise ConfigError("discretized-continuous mode needs a box-bounded problem")
    if isinstance(cfg.beta, list):
        if cfg.mode != "discretized-continuous":
            raise ConfigError("per-function beta lists need mode 'discretized-continuous'")
        if len(cfg.beta) != problem.m + problem.c:
            raise ConfigError(f"beta list needs {problem.m + problem.c} entries")
    cfg.require_feasible_init = as_bool("require_feasible_init", dflt.get("require_feasible_init", False))
    cfg.continue_after_declaration = as_bool(
        "continue_after_declaration", dflt.get("continue_after_declaration", False))
    cfg.normalize_metrics = as_bool("normalize_metrics", False)
    cfg.mc_samples = as_int("mc_samples", 10000, 0)
    cfg.grid_cap = as_int("grid_cap", 64, 2)
    c_tau = get("c_tau", 1.0)
    if not isinstance(c_tau, (int, float)) or isinstance(c_tau, bool) or c_tau <= 0:
        raise ConfigError("c_tau must be > 0")
    cfg.c_tau = float(c_tau)
    baselines = get("baselines", [])
    if not isinstance(baselines, list) or any(b not in ("random",) for b in baselines):
        raise ConfigError("baselines must be a list drawn from ['random']")
    cfg.baselines = sorted(set(baselines))
    out = get("output_dir", None)
    if out is not None and not isinstance(out, str):
        raise ConfigError("output_dir must be a string")
    cfg.output_dir = out
    return cfg


def serialize_config(cfg: ExperimentConfig) -> str:
    return json.dumps(dataclasses.asdict(cfg), indent=2)


def _read_points(path) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    if rows:
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            rows = rows[1:]  # header
    if not rows:
        return np.zeros((0, 0))
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InputError(f"{path}: rows have mixed column counts {sorted(widths)}")
    try:
        return np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric cell ({exc})") from None


def run_config(cfg: ExperimentConfig, problem: ProblemSpec) -> RunConfig:
    candidates = None
    if cfg.candidates_path:
        try:
            candidates = _read_points(cfg.candidates_path)
        except InputError as exc:
            raise ConfigError(str(exc)) from None
        if candidates.ndim != 2 or candidates.shape[1] != problem.d:
            raise ConfigError(f"candidates file must have {problem.d} columns")
    if isinstance(cfg.beta, list):
        beta = [_beta_from_dict(b, cfg.delta) for b in cfg.beta]
    else:
        beta = _beta_from_dict(cfg.beta, cfg.delta)
    grid = cfg.hyper_grid or {}
    return RunConfig(
        T=cfg.T, z=list(cfg.z),
        kernels_f=[_kernel_from_dict(k) for k in cfg.kernel_f],
        kernels_g=[_kernel_from_dict(k) for k in cfg.kernel_g],
        beta=beta, n_init=cfg.n_init, mode=cfg.mode, candidates=candidates,
        resolution=cfg.resolution,
        require_feasible_init=cfg.require_feasible_init,
        continue_after_declaration=cfg.continue_after_declaration,
        hyper_amplitudes=grid.get("amplitudes", []),
        hyper_lengthscales=grid.get("lengthscales", []),
        grid_cap=cfg.grid_cap, c_tau=cfg.c_tau,
    )


def seed_stream(base_seed: int, method: str, seed: int) -> np.random.Generator:
    """Independent generator per (base seed, method, seed).

    Adding a method leaves the streams of the others unchanged.
    """
    return np.random.default_rng(np.random.SeedSequence([base_seed, zlib.crc32(method.encode()), seed]))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def trajectory_header(problem: ProblemSpec) -> list[str]:
    d, m, c = problem.d, problem.m, problem.c
    return (
        ["t", "method", "seed"]
        + [f"x_{i}" for i in range(d)]
        + [f"f_{i}" for i in range(m)]
        + [f"g_{j}" for j in range(c)]
        + [f"yf_{i}" for i in range(m)]
        + [f"yg_{j}" for j in range(c)]
        + ["beta", "feasible", "declared", "hv", "r"]
        + [f"v_{j}" for j in range(c)]
        + ["R_cum"]
        + [f"V_cum_{j}" for j in range(c)]
        + ["C"]
    )


def trajectory_rows(problem: ProblemSpec, method: str, seed: int, records, series) -> list[list[str]]:
    rows = []
    k = 0
    d, m, c = problem.d, problem.m, problem.c
    blank = lambda n: [""] * n  # noqa: E731
    for rec in records:
        head = [_fmt(rec.t), method, _fmt(seed)]
        if not rec.queried:
            rows.append(head + blank(d + 2 * m + 2 * c) + [_fmt(rec.beta), "", "1"]
                        + blank(2 + c + 1 + c + 1))
            continue
        row = head + [_fmt(v) for v in rec.x]
        row += [_fmt(v) for v in rec.F_true] + [_fmt(v) for v in rec.G_true]
        row += [_fmt(v) for v in rec.y_f] + [_fmt(v) for v in rec.y_g]
        row += [_fmt(rec.beta) if rec.round >= 1 else "", _fmt(rec.feasible_true), _fmt(rec.declared)]
        row += [_fmt(series.hv[k]), _fmt(series.r[k])] + [_fmt(v) for v in series.v[k]]
        row += [_fmt(series.R_cum[k])] + [_fmt(v) for v in series.V_cum[k]]
        row += [_fmt(series.C[k]) if np.isfinite(series.C[k]) else ""]
        rows.append(row)
        k += 1
    return rows


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue(), newline="")


def summary_header(metric_names) -> list[str]:
    cols = ["method", "t", "round", "n_runs", "n_declared"]
    for name in metric_names:
        cols += [f"{name}_mean", f"{name}_median", f"{name}_lo", f"{name}_hi"]
    return cols


@dataclass
class ExperimentResult:
    exit_code: int
    out_dir: Path
    files: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    records: dict = field(default_factory=dict)
    hv_star: float = 0.0
    message: str = ""


def resolve_output_dir(cfg: ExperimentConfig, out_dir=None) -> Path:
    if out_dir is not None:
        return Path(out_dir)
    env = os.environ.get(OUTPUT_ENV)
    if env:
        return Path(env)
    if cfg.output_dir:
        return Path(cfg.output_dir)
    return Path("runs") / cfg.problem


def run_experiment(cfg: ExperimentConfig, out_dir=None, baselines=None) -> ExperimentResult:
    """Run every method over every seed and write trajectories, summary and manifest.

    Output directory precedence: ``out_dir`` argument, then the
    ``COMBOO_OUTPUT_DIR`` environment variable, then ``cfg.output_dir``.
    A ``FAILED`` marker is written next to partial outputs on error.
    """
    out = resolve_output_dir(cfg, out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failed = out / "FAILED"
    if failed.exists():
        failed.unlink()
    methods = ["comboo"] + sorted(set(cfg.baselines) | set(baselines or []))
    result = ExperimentResult(EXIT_OK, out)
    try:
        problem = build_problem(cfg)
        rcfg = run_config(cfg, problem)
        X = rcfg.candidates
        if X is None:
            X = candidate_grid(problem, rcfg.resolution)
        truth = true_pareto_hv(problem, cfg.z, candidates=X)
        result.hv_star = truth.hv_star
        manifest = {
            "config": dataclasses.asdict(cfg),
            "methods": methods,
            "problem": {"name": problem.name, "d": problem.d, "m": problem.m, "c": problem.c,
                        "known_feasible": problem.known_feasible,
                        "noise_sd_f": list(problem.noise_sd_f), "noise_sd_g": list(problem.noise_sd_g)},
            "n_candidates": int(len(X)),
            "hv_star": truth.hv_star,
            "front_size": int(len(truth.front)),
            "feasible_found": truth.feasible_found,
        }
        if cfg.mc_samples and truth.feasible_found:
            rng = seed_stream(cfg.base_seed, "hv_check", 0)
            est, se = hypervolume_mc(truth.front, cfg.z, cfg.mc_samples, rng, return_stderr=True)
            manifest["hv_star_mc"] = est
            manifest["hv_star_mc_stderr"] = se
        declared_feasible = []
        for method in methods:
            all_series = []
            for seed in cfg.seeds:
                rng = seed_stream(cfg.base_seed, method, seed)
                if method == "comboo":
                    records = run(problem, rcfg, rng)
                else:
                    records = random_search_run(problem, rcfg, rng)
                series = compute_series(records, truth.hv_star, cfg.z, cfg.normalize_metrics)
                if method == "comboo" and problem.known_feasible and series.declared_round >= 0:
                    declared_feasible.append(seed)
                path = out / f"trajectory_{method}_seed{seed}.csv"
                _write_csv(path, trajectory_header(problem),
                           trajectory_rows(problem, method, seed, records, series))
                result.files.append(path)
                result.records[(method, seed)] = records
                result.series[(method, seed)] = series
                all_series.append(series)
            manifest.setdefault("declared_rounds", {})[method] = {
                str(seed): result.series[(method, seed)].declared_round for seed in cfg.seeds
            }
        rows = _summary_rows(methods, cfg.seeds, result.series)
        names = list(metric_columns(next(iter(result.series.values()))))
        spath = out / "summary.csv"
        _write_csv(spath, summary_header(names), rows)
        result.files.append(spath)
        mpath = out / "manifest.json"
        mpath.write_text(json.dumps(manifest, indent=2, default=_json_default) + "\n")
        result.files.append(mpath)
        if declared_feasible:
            result.exit_code = EXIT_DECLARED_FEASIBLE
            result.message = f"infeasibility declared on a known-feasible problem (seeds {declared_feasible})"
    except ConfigError as exc:
        result.exit_code, result.message = EXIT_CONFIG, str(exc)
    except (NumericalError, ComboError, ArithmeticError, ValueError) as exc:
        result.exit_code, result.message = EXIT_RUNTIME, f"{type(exc).__name__}: {exc}"
    if result.exit_code in (EXIT_CONFIG, EXIT_RUNTIME):
        failed.write_text(result.message + "\n")
        log.error("experiment failed: %s", result.message)
    return result


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _summary_rows(methods, seeds, series_by_key) -> list[list[str]]:
    rows = []
    for method in methods:
        runs = [series_by_key[(method, s)] for s in seeds]
        # a declaring run gets one extra row so the declaration round is listed
        length = max(len(s) + (s.declared_round >= 0) for s in runs)
        runs = [pad_series(s, length) for s in runs]
        if len(runs) == 1:
            runs = runs * 2  # a single seed yields zero-width bands
            n_runs = 1
        else:
            n_runs = len(runs)
        summ = summarize(runs)
        for k in range(length):
            row = [method, _fmt(summ.t[k]), _fmt(summ.round[k]), _fmt(n_runs),
                   _fmt(summ.n_declared[k] if n_runs > 1 else min(summ.n_declared[k], 1))]
            for band in summ.bands.values():
                for arr in (band.mean, band.median, band.lo, band.hi):
                    row.append(_fmt(arr[k]) if np.isfinite(arr[k]) else "")
            rows.append(row)
    return rows


def compute_hv_file(path, z, mc: Optional[int] = None, seed: int = 0) -> float:
    """Hypervolume of the points in a CSV file (exact, or MC with ``mc`` samples)."""
    pts = _read_points(path)
    z = [float(v) for v in z]
    if pts.size == 0:
        return 0.0
    if pts.shape[1] != len(z):
        raise InputError(f"{path}: {pts.shape[1]} columns but z has {len(z)} entries")
    if mc:
        return hypervolume_mc(pts, z, mc, np.random.default_rng(seed))
    return hypervolume_exact(pts, z)


def format_hv(value: float) -> str:
    return f"{value:.9f}"


def problem_table() -> list[dict]:
    rows = []
    for name in sorted(REGISTRY):
        p = REGISTRY[name]
        if p.bounds is not None:
            dom = ";".join(f"[{lo:g},{hi:g}]" for lo, hi in p.bounds)
        elif p.candidates is not None:
            dom = f"{len(p.candidates)} discrete points"
        else:
            dom = "external"
        dflt = p.defaults
        rows.append({
            "name": name, "d": p.d, "m": p.m, "c": p.c, "domain": dom,
            "noise_sd_f": " ".join(f"{v:g}" for v in p.noise_sd_f),
            "noise_sd_g": " ".join(f"{v:g}" for v in p.noise_sd_g),
            "z": " ".join(f"{v:g}" for v in dflt.get("z", ())),
            "resolution": str(dflt.get("resolution", "")),
            "known_feasible": int(p.known_feasible),
            "shipped": int(p.evaluator is not None),
            "description": p.description,
        })
    return rows
