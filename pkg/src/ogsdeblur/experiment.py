"""Experiment runner: configuration files, single restorations and sweeps.

Configuration files are flat UTF-8 ``key = value`` lines; ``#`` starts a
comment.  Lists are comma separated and the per-level regularization weight
is written ``mu = 0.3:100, 0.4:80`` (or a single number for every level)::

    input = cameraman.pgm
    kernel = gaussian:7:5
    noise_levels = 0.3, 0.4
    seeds = 1, 2
    inner_iters = 1, 3, 5

A sweep runs the Cartesian grid ``noise_levels x inner_iters x seeds`` in that
nesting order and writes ``results.csv`` plus ``runs.jsonl``, which holds the
complete replayable settings of every row.
"""

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import hashlib
import json
import logging
from pathlib import Path
import time

import numpy as np

from . import pnm, spectral
from .degradation import KernelSpec, NoiseSpec, degrade, make_kernel
from .metrics import psnr, relative_error
from .ogs import GroupConfig, MMSettings
from .solver import SolverParams, solve

log = logging.getLogger(__name__)

RESULT_HEADER = ["image", "kernel", "level", "seed", "mu", "iters", "psnr_db", "ree", "seconds", "status"]
TRACE_HEADER = ["iter", "objective", "psnr_db", "seconds"]

# mu for noise levels 0.3, 0.4, 0.5, 0.6 per blur kernel.
DEFAULT_MU = {
    "gaussian:7:5": {0.3: 100.0, 0.4: 80.0, 0.5: 60.0, 0.6: 40.0},
    "gaussian:15:5": {0.3: 120.0, 0.4: 110.0, 0.5: 100.0, 0.6: 90.0},
    "average:7": {0.3: 100.0, 0.4: 80.0, 0.5: 60.0, 0.6: 40.0},
}

SOLVER_KEYS = {
    "beta1": float,
    "beta2": float,
    "beta3": float,
    "gamma": float,
    "group_size": int,
    "inner_tol": float,
    "tol": float,
    "max_iters": int,
}


class ConfigError(ValueError):
    pass


def _level_key(level):
    return round(float(level), 10)


@dataclass
class ExperimentConfig:
    input_image: Path
    kernel: KernelSpec = field(default_factory=KernelSpec)
    noise_levels: list = field(default_factory=lambda: [0.4])
    seeds: list = field(default_factory=lambda: [1])
    mu_per_level: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    output_dir: Path = Path("out")
    inner_iters: list = field(default_factory=lambda: [5])
    degrade: bool = True
    reference: Path | None = None
    workers: int = 1
    emit_trace: bool = False

    def __post_init__(self):
        self.input_image = Path(self.input_image)
        self.output_dir = Path(self.output_dir)
        if self.reference is not None:
            self.reference = Path(self.reference)
        for lv in self.noise_levels:
            if not 0.0 <= lv <= 1.0:
                raise ConfigError(f"noise level {lv} outside [0, 1]")
        mu = {_level_key(k): float(v) for k, v in self.mu_per_level.items()}
        if not mu:
            mu = dict(DEFAULT_MU.get(str(self.kernel), {}))
        missing = [lv for lv in self.noise_levels if _level_key(lv) not in mu]
        if missing:
            raise ConfigError(f"no mu given for noise level(s) {missing} with kernel {self.kernel}")
        self.mu_per_level = mu
        unknown = set(self.solver) - set(SOLVER_KEYS)
        if unknown:
            raise ConfigError(f"unknown solver setting(s): {sorted(unknown)}")

    def runs(self):
        """Every run of the sweep, in output order."""
        image_id = self.input_image.stem
        for level in self.noise_levels:
            for nit in self.inner_iters:
                for seed in self.seeds:
                    yield RunSpec(
                        image=str(self.input_image),
                        image_id=image_id,
                        kernel=str(self.kernel),
                        level=float(level),
                        seed=int(seed),
                        mu=self.mu_per_level[_level_key(level)],
                        inner_iters=int(nit),
                        solver=dict(self.solver),
                        degrade=self.degrade,
                        reference=str(self.reference) if self.reference else None,
                    )

    def to_text(self):
        lines = [
            f"input = {self.input_image}",
            f"output_dir = {self.output_dir}",
            f"kernel = {self.kernel}",
            "noise_levels = " + ", ".join(f"{x:g}" for x in self.noise_levels),
            "seeds = " + ", ".join(str(s) for s in self.seeds),
            "mu = " + ", ".join(f"{k:g}:{v:g}" for k, v in sorted(self.mu_per_level.items())),
            "inner_iters = " + ", ".join(str(n) for n in self.inner_iters),
            f"degrade = {str(self.degrade).lower()}",
            f"workers = {self.workers}",
            f"emit_trace = {str(self.emit_trace).lower()}",
        ]
        if self.reference is not None:
            lines.append(f"reference = {self.reference}")
        lines += [f"{k} = {v}" for k, v in sorted(self.solver.items())]
        return "\n".join(lines) + "\n"


@dataclass
class RunSpec:
    """Everything needed to reproduce one restoration."""

    image: str
    image_id: str
    kernel: str
    level: float
    seed: int
    mu: float
    inner_iters: int = 5
    solver: dict = field(default_factory=dict)
    degrade: bool = True
    reference: str | None = None

    def params(self):
        s = self.solver
        return SolverParams(
            mu=self.mu,
            beta1=s.get("beta1", 1.0),
            beta2=s.get("beta2", 500.0),
            beta3=s.get("beta3", 1.0),
            gamma=s.get("gamma", 1.618),
            group=GroupConfig(s.get("group_size", 3)),
            inner=MMSettings(self.inner_iters, s.get("inner_tol", 1e-3)),
            tol=s.get("tol", 1e-5),
            max_iters=s.get("max_iters", 500),
        )

    def config_hash(self):
        """Digest of the settings, excluding the noise seed."""
        d = asdict(self)
        d.pop("seed")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


@dataclass
class ResultRow:
    image: str
    kernel: str
    level: float
    seed: int
    mu: float
    iters: int
    psnr_db: float
    ree: float
    seconds: float
    status: str = "ok"

    def as_csv(self):
        def num(x):
            return repr(float(x)) if x is not None else "nan"

        return [
            self.image, self.kernel, f"{self.level:g}", str(self.seed), f"{self.mu:g}",
            str(self.iters), num(self.psnr_db), num(self.ree), f"{self.seconds:.4f}", self.status,
        ]


@dataclass
class RunOutcome:
    row: ResultRow
    record: dict
    observed: np.ndarray | None = None
    restored: np.ndarray | None = None
    trace: list | None = None


def load_inputs(spec):
    """Return ``(observed, reference)`` for one run."""
    clean = pnm.read_image(spec.image)
    if spec.degrade:
        observed = degrade(clean, KernelSpec.parse(spec.kernel), NoiseSpec(spec.level, spec.seed))
        reference = clean
    else:
        observed = clean
        reference = pnm.read_image(spec.reference) if spec.reference else None
    if reference is not None and reference.shape != observed.shape:
        raise ValueError(f"reference shape {reference.shape} differs from input {observed.shape}")
    return observed, reference


def execute(spec, keep_images=False):
    """Run one restoration; failures become a row status, not an exception."""
    record = asdict(spec)
    record["config_hash"] = spec.config_hash()
    t0 = time.perf_counter()
    try:
        observed, reference = load_inputs(spec)
        record["observed_sha256"] = hashlib.sha256(observed.tobytes()).hexdigest()
        op = spectral.build_spectral(make_kernel(KernelSpec.parse(spec.kernel)), *observed.shape)
        report = solve(observed, op, spec.params(), reference=reference)
    except Exception as exc:  # recorded per run so a sweep keeps going
        log.warning("run %s seed=%s failed: %s", spec.image_id, spec.seed, exc)
        row = ResultRow(spec.image_id, spec.kernel, spec.level, spec.seed, spec.mu, 0,
                        None, None, time.perf_counter() - t0, f"error: {exc}")
        record["status"] = row.status
        return RunOutcome(row, record)

    seconds = time.perf_counter() - t0
    if reference is not None:
        p, e = psnr(report.restored, reference), relative_error(report.restored, reference)
    else:
        p = e = None
    row = ResultRow(spec.image_id, spec.kernel, spec.level, spec.seed, spec.mu,
                    report.iterations, p, e, seconds)
    record.update(status="ok", termination=report.termination.value,
                  iters=report.iterations, psnr_db=p, ree=e)
    trace = list(zip(range(len(report.objective_trace)), report.objective_trace,
                     report.psnr_trace or [None] * len(report.objective_trace),
                     report.timestamps))
    if keep_images:
        return RunOutcome(row, record, observed, report.restored, trace)
    return RunOutcome(row, record, trace=trace)


def write_results(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULT_HEADER)
        for row in rows:
            w.writerow(row.as_csv())


def read_results(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_trace(trace, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for it, obj, p, t in trace:
            w.writerow([it, repr(obj), "nan" if p is None else repr(p), f"{t:.6f}"])


def run_sweep(config):
    """Run every configured restoration and write ``results.csv``.

    Returns the list of :class:`ResultRow` in grid order.
    """
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    specs = list(config.runs())
    if config.workers > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(execute, specs))
    else:
        outcomes = [execute(s) for s in specs]

    write_results([o.row for o in outcomes], out / "results.csv")
    with open(out / "runs.jsonl", "w") as fh:
        for o in outcomes:
            fh.write(json.dumps(o.record, sort_keys=True) + "\n")
    if config.emit_trace:
        for i, (s, o) in enumerate(zip(specs, outcomes)):
            if o.trace is not None:
                name = f"trace_{i:03d}_{s.image_id}_l{s.level:g}_n{s.inner_iters}_s{s.seed}.csv"
                write_trace(o.trace, out / name)
    (out / "config.txt").write_text(config.to_text(), encoding="utf-8")
    return [o.row for o in outcomes]


def replay(record):
    """Re-execute a ``runs.jsonl`` record."""
    fields = RunSpec.__dataclass_fields__
    return execute(RunSpec(**{k: v for k, v in record.items() if k in fields})).row


# -- configuration files ------------------------------------------------------

def parse_kv(text):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.lower().replace("-", "_")] = value
    return values


def _list(value, conv):
    return [conv(x) for x in value.replace(";", ",").split(",") if x.strip()]


def _bool(value):
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def parse_mu(value, levels):
    """``80`` applies to every level; ``0.3:100, 0.4:80`` maps levels."""
    value = value.strip()
    if ":" not in value:
        return {lv: float(value) for lv in levels}
    mu = {}
    for item in _list(value, str):
        lv, m = item.split(":")
        mu[float(lv)] = float(m)
    return mu


def config_from_mapping(values):
    """Build an :class:`ExperimentConfig` from parsed ``key = value`` pairs."""
    values = dict(values)
    known = {"input", "output_dir", "kernel", "noise_levels", "seeds", "mu", "inner_iters",
             "degrade", "reference", "workers", "emit_trace"} | set(SOLVER_KEYS)
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {sorted(unknown)}")
    if "input" not in values:
        raise ConfigError("configuration needs an input image")
    try:
        kernel = KernelSpec.parse(values.get("kernel", "gaussian:7:5"))
        levels = _list(values.get("noise_levels", "0.4"), float)
        cfg = dict(
            input_image=values["input"],
            kernel=kernel,
            noise_levels=levels,
            seeds=_list(values.get("seeds", "1"), int),
            mu_per_level=parse_mu(values["mu"], levels) if "mu" in values else {},
            solver={k: SOLVER_KEYS[k](values[k]) for k in SOLVER_KEYS if k in values},
            output_dir=values.get("output_dir", "out"),
            inner_iters=_list(values.get("inner_iters", "5"), int),
            degrade=_bool(values.get("degrade", "true")),
            reference=values.get("reference"),
            workers=int(values.get("workers", "1")),
            emit_trace=_bool(values.get("emit_trace", "false")),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    return ExperimentConfig(**cfg)


def load_config(path, overrides=None):
    """Read a configuration file; ``overrides`` (same keys) take precedence."""
    values = parse_kv(Path(path).read_text(encoding="utf-8"))
    values.update(overrides or {})
    return config_from_mapping(values)
