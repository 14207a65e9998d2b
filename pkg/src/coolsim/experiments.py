"""Config-driven experiment runner producing deterministic CSV tables.

Experiments are described by a single ``[experiment]`` table in a TOML file.
Every run is fully deterministic (no randomness anywhere in the pipeline):
the same config yields a byte-identical CSV. Rows follow the fixed schema

    experiment,provenance,n,p,epsilon,eta,metric,value

with floats serialized to 17 significant digits, LF line endings and UTF-8.
Coordinates that do not apply to a row are left empty. Metrics carrying an
extra index (dynamics round, composition depth) encode it in the metric name
as ``name[k]``.
"""

from __future__ import annotations

import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .channels import bitflip_channel, no_noise, timekeeping_channel
from .dc import ThermalSpec, effective_temperature, gda_dc_output, ideal_dc_output
from .errors import ConfigError
from . import gda as _gda
from . import markov as _markov
from . import simulate as _simulate

PROVENANCES = ("ideal", "physical", "gda")
KINDS = ("tsac_scan", "dc_grid", "dynamics", "twodesign", "cooling_limit", "eta_table")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n_values: tuple[int, ...] = ()
    p_values: tuple[float, ...] = ()
    cases: tuple[tuple[int, float], ...] = ()  # explicit (n, p) pairs (dynamics)
    p_initial: float | None = None
    epsilon: float | None = None
    t_initial_mk: float = 163.0
    frequency_ghz: float = 10.0
    repetitions: tuple[int, ...] = (0, 1, 2, 3, 4, 5)
    rounds: int = 60
    noise_model: str = "timekeeping"
    max_physical_n: int = 6
    workers: int = 0
    output: str = ""

    def resolved_epsilon(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        if self.p_initial is not None:
            if not 0.5 < self.p_initial < 1.0:
                raise ConfigError("p_initial must lie in (0.5, 1)")
            return 0.5 * math.log(self.p_initial / (1.0 - self.p_initial))
        raise ConfigError("need either epsilon or p_initial")

    def output_name(self) -> str:
        return self.output or f"{self.kind}.csv"


@dataclass(frozen=True)
class ResultRecord:
    experiment: str
    provenance: str
    n: int | None
    p: float | None
    epsilon: float | None
    eta: float | None
    metric: str
    value: float

    def sort_key(self):
        return (
            self.metric,
            self.provenance,
            -1 if self.n is None else self.n,
            -1.0 if self.p is None else self.p,
        )


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{x:.17g}"


CSV_HEADER = "experiment,provenance,n,p,epsilon,eta,metric,value"


def records_to_csv(records: list[ResultRecord]) -> str:
    lines = [CSV_HEADER]
    for r in sorted(records, key=ResultRecord.sort_key):
        lines.append(
            ",".join(
                [
                    r.experiment,
                    r.provenance,
                    _fmt(r.n),
                    _fmt(r.p),
                    _fmt(r.epsilon),
                    _fmt(r.eta),
                    r.metric,
                    _fmt(r.value),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_csv(records: list[ResultRecord], path: str | Path) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(records_to_csv(records))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    if "experiment" not in data or not isinstance(data["experiment"], dict):
        raise ConfigError("config must contain a single [experiment] table")
    table = data["experiment"]
    known = {f.name for f in ExperimentConfig.__dataclass_fields__.values()}
    for key in table:
        if key not in known:
            raise ConfigError(f"unknown field [experiment].{key}")
    if "kind" not in table:
        raise ConfigError("missing required field [experiment].kind")
    if table["kind"] not in KINDS:
        raise ConfigError(f"unknown kind {table['kind']!r}; expected one of {KINDS}")
    for seq_field, caster in (("n_values", int), ("p_values", float), ("repetitions", int)):
        if seq_field in table:
            try:
                table[seq_field] = tuple(caster(v) for v in table[seq_field])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"[experiment].{seq_field} must be a list of numbers") from exc
    if "cases" in table:
        try:
            table["cases"] = tuple((int(n), float(p)) for n, p in table["cases"])
        except (TypeError, ValueError) as exc:
            raise ConfigError("[experiment].cases must be a list of [n, p] pairs") from exc
    cfg = ExperimentConfig(**table)
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    grid_kinds = ("tsac_scan", "dc_grid", "cooling_limit", "eta_table")
    if cfg.kind in grid_kinds:
        if not cfg.n_values or not cfg.p_values:
            raise ConfigError(f"{cfg.kind} needs non-empty n_values and p_values")
    if cfg.kind == "dynamics" and not (cfg.cases or (cfg.n_values and cfg.p_values)):
        raise ConfigError("dynamics needs cases or n_values and p_values")
    if cfg.kind == "twodesign" and not cfg.n_values:
        raise ConfigError("twodesign needs n_values")
    if any(n < 2 for n in cfg.n_values):
        raise ConfigError("qubit counts must be at least 2")
    if any(not 0 <= p < 1 for p in cfg.p_values):
        raise ConfigError("error probabilities must lie in [0, 1)")
    if cfg.noise_model not in ("timekeeping", "bitflip"):
        raise ConfigError(f"unknown noise model {cfg.noise_model!r}")
    if cfg.kind in ("tsac_scan", "cooling_limit", "dynamics", "twodesign"):
        cfg.resolved_epsilon()


def _noise(model: str, p: float):
    if p == 0:
        return no_noise()
    return timekeeping_channel(p) if model == "timekeeping" else bitflip_channel(p)


def _worker_count(cfg: ExperimentConfig, n_tasks: int) -> int:
    env = os.environ.get("COOLSIM_THREADS")
    if env is not None:
        try:
            requested = int(env)
        except ValueError as exc:
            raise ConfigError(f"COOLSIM_THREADS must be an integer, got {env!r}") from exc
    else:
        requested = cfg.workers or (os.cpu_count() or 1)
    return max(1, min(requested, n_tasks))


def _tsac_physical_task(args) -> tuple[tuple[int, float], float]:
    n, p, epsilon, model = args
    sim_cfg = _simulate.SimConfig(n, _noise(model, p), epsilon)
    _, p_final = _simulate.run_tsac(sim_cfg)
    return (n, p), p_final


def _dc_physical_task(args) -> tuple[tuple[int, float], float]:
    n, p, t_initial, freq = args
    spec = ThermalSpec(t_initial, freq)
    _, t_eff = _simulate.run_dc(n, spec, _noise("timekeeping", p))
    return (n, p), t_eff


def _parallel_map(task_fn, tasks, workers: int) -> dict:
    if workers <= 1 or len(tasks) <= 1:
        return dict(task_fn(t) for t in tasks)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return dict(pool.map(task_fn, tasks))


def _tsac_eta(model: str, p: float, n: int) -> _gda.GdaEstimate:
    n_tg = _simulate.tsac_gate_count(n)
    d = 2**n
    if model == "timekeeping":
        return _gda.eta_timekeeping(p, n_tg, d)
    return _gda.eta_bitflip(p, n_tg, d)


def _tsac_population_records(cfg: ExperimentConfig) -> list[ResultRecord]:
    """P_n rows for the gda and physical provenances over the (n, p) grid."""
    eps = cfg.resolved_epsilon()
    records = []
    phys_tasks = sorted(
        (n, p, eps, cfg.noise_model)
        for n in cfg.n_values
        for p in cfg.p_values
        if n <= cfg.max_physical_n
    )
    phys = _parallel_map(_tsac_physical_task, phys_tasks, _worker_count(cfg, len(phys_tasks)))
    for p in cfg.p_values:
        for n in cfg.n_values:
            est = _tsac_eta(cfg.noise_model, p, n)
            limit = _markov.steady_state_analytic(n - 1, eps, min(est.eta, 1 - 1e-15))
            records.append(
                ResultRecord(
                    cfg.kind, "gda", n, p, eps, est.eta, "P_n", _markov.target_population(limit)
                )
            )
            if (n, p) in phys:
                records.append(
                    ResultRecord(cfg.kind, "physical", n, p, eps, est.eta, "P_n", phys[(n, p)])
                )
    return records


def _run_tsac_scan(cfg: ExperimentConfig) -> list[ResultRecord]:
    records = _tsac_population_records(cfg)
    eps = cfg.resolved_epsilon()
    by = {(r.provenance, r.n, r.p): r.value for r in records}
    for prov in ("gda", "physical"):
        for p in cfg.p_values:
            rows = [(n, by[(prov, n, p)]) for n in cfg.n_values if (prov, n, p) in by]
            if not rows:
                continue
            n_opt, p_max = max(rows, key=lambda r: (r[1], -r[0]))
            records.append(ResultRecord(cfg.kind, prov, None, p, eps, None, "n_opt", float(n_opt)))
            records.append(ResultRecord(cfg.kind, prov, None, p, eps, None, "P_max", p_max))
    return records


def _run_cooling_limit(cfg: ExperimentConfig) -> list[ResultRecord]:
    records = _tsac_population_records(cfg)
    eps = cfg.resolved_epsilon()
    for n in cfg.n_values:
        limit = _markov.steady_state_analytic(n - 1, eps, 0.0)
        records.append(
            ResultRecord(cfg.kind, "ideal", n, None, eps, 0.0, "P_n", _markov.target_population(limit))
        )
    return records


def _run_dc_grid(cfg: ExperimentConfig) -> list[ResultRecord]:
    t_init = cfg.t_initial_mk * 1e-3
    freq = cfg.frequency_ghz * 1e9
    spec = ThermalSpec(t_init, freq)
    tasks = sorted((n, p, t_init, freq) for n in cfg.n_values for p in cfg.p_values)
    phys = _parallel_map(_dc_physical_task, tasks, _worker_count(cfg, len(tasks)))
    records = []
    for n in cfg.n_values:
        n_tg = _simulate.dc_gate_count(n)
        t_ideal = effective_temperature(ideal_dc_output(n, spec), freq)
        records.append(
            ResultRecord(cfg.kind, "ideal", n, None, None, 0.0, "T_eff_mK", t_ideal * 1e3)
        )
        for p in cfg.p_values:
            est = _gda.eta_timekeeping(p, n_tg, 2**n)
            t_model = effective_temperature(gda_dc_output(n, spec, p, n_tg), freq)
            t_sim = phys[(n, p)]
            records.append(
                ResultRecord(cfg.kind, "gda", n, p, None, est.eta, "T_eff_mK", t_model * 1e3)
            )
            records.append(
                ResultRecord(cfg.kind, "physical", n, p, None, est.eta, "T_eff_mK", t_sim * 1e3)
            )
            records.append(
                ResultRecord(
                    cfg.kind, "gda", n, p, None, est.eta, "T_rel_err",
                    abs(t_sim - t_model) / t_model,
                )
            )
    return records


def _run_dynamics(cfg: ExperimentConfig) -> list[ResultRecord]:
    eps = cfg.resolved_epsilon()
    cases = cfg.cases or tuple((n, p) for n in cfg.n_values for p in cfg.p_values)
    records = []
    for n, p in cases:
        est = _tsac_eta(cfg.noise_model, p, n)
        v0 = _markov.thermal_diagonal(n - 1, eps)
        ideal = _markov.iterate_dynamics(n - 1, eps, 0.0, v0, cfg.rounds)
        model = _markov.iterate_dynamics(n - 1, eps, min(est.eta, 1.0), v0, cfg.rounds)
        sim_cfg = _simulate.SimConfig(
            n, _noise(cfg.noise_model, p), eps, max_rounds=cfg.rounds, conv_tol=1e-300
        )
        traj, _ = _simulate.run_tsac(sim_cfg)
        # a run frozen to the fixed point stays there for the remaining rounds
        while len(traj.populations) < cfg.rounds + 1:
            traj.populations.append(traj.populations[-1])
        for r in range(cfg.rounds + 1):
            records.append(
                ResultRecord(cfg.kind, "ideal", n, p, eps, 0.0, f"population[{r}]", ideal[r])
            )
            records.append(
                ResultRecord(cfg.kind, "gda", n, p, eps, est.eta, f"population[{r}]", model[r])
            )
            records.append(
                ResultRecord(
                    cfg.kind, "physical", n, p, eps, est.eta, f"population[{r}]",
                    traj.populations[r],
                )
            )
    return records


def _run_twodesign(cfg: ExperimentConfig) -> list[ResultRecord]:
    eps = cfg.resolved_epsilon()
    p_init = cfg.p_initial if cfg.p_initial is not None else 0.8
    records = []
    for n in cfg.n_values:
        p = cfg.p_values[0] if cfg.p_values else 1e-3
        noise = _noise(cfg.noise_model, p)
        for reps, fid in _simulate.twodesign_validation(n, list(cfg.repetitions), p_init, noise):
            records.append(
                ResultRecord(cfg.kind, "physical", n, p, eps, None, f"fidelity[{reps}]", fid)
            )
    return records


def _run_eta_table(cfg: ExperimentConfig) -> list[ResultRecord]:
    records = []
    for n in cfg.n_values:
        n_tg = _simulate.tsac_gate_count(n)
        for p in cfg.p_values:
            est = _tsac_eta(cfg.noise_model, p, n)
            records.append(ResultRecord(cfg.kind, "gda", n, p, None, est.eta, "eta", est.eta))
            records.append(ResultRecord(cfg.kind, "gda", n, p, None, est.eta, "n_tg", float(n_tg)))
            records.append(ResultRecord(cfg.kind, "gda", n, p, None, est.eta, "q", est.q))
    return records


_RUNNERS = {
    "tsac_scan": _run_tsac_scan,
    "dc_grid": _run_dc_grid,
    "dynamics": _run_dynamics,
    "twodesign": _run_twodesign,
    "cooling_limit": _run_cooling_limit,
    "eta_table": _run_eta_table,
}


def run_experiment(cfg: ExperimentConfig) -> list[ResultRecord]:
    runner = _RUNNERS.get(cfg.kind)
    if runner is None:
        raise ConfigError(f"unknown experiment kind {cfg.kind!r}")
    return sorted(runner(cfg), key=ResultRecord.sort_key)
