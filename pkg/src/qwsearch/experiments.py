"""Experiment runners behind the command line: single instances, seed
ensembles, and the search / state-transfer figures. Every runner writes
CSV and JSON only; floats are written with ``repr`` so files re-read to
the exact in-memory values.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import graphs
from .dynamics import DEFAULT_STEPS, EvolutionTrace
from .protocols import ProtocolSpec, run_bell, run_transfer
from .search import (
    SearchInstance,
    grover_probability,
    lowest_pair_separation,
    perturbation_prediction,
    run_search,
    search_report,
)
from .spectra import adjacency_spectrum, empirical_bulk_density, histogram_to_csv, spectral_report

log = logging.getLogger(__name__)

COMMANDS = ("generate", "spectrum", "search", "transfer", "bell", "ensemble", "figure1", "figure2")
ENSEMBLE_TASKS = ("spectrum", "search", "transfer", "bell")
DEFAULT_SEED = 42


@dataclass
class ExperimentConfig:
    command: str = "search"
    model: str | None = None
    n: int = 1000
    p: float | None = None
    d: int | None = None
    seed: int = DEFAULT_SEED
    gamma: str = "auto"
    w: int = 0
    endpoints: tuple[int, ...] | None = None
    t_max: float | None = None
    steps: int = DEFAULT_STEPS
    ensemble_size: int = 10
    task: str = "search"
    bins: int = 50
    p_list: tuple[float, ...] = (0.1, 0.01, 0.002)
    jobs: int = 1
    output_dir: Path = Path("out")

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.command not in COMMANDS:
            raise ValueError(f"command: unknown command {self.command!r}")
        if self.n < 1:
            raise ValueError(f"n: must be >= 1, got {self.n}")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p: must lie in [0, 1], got {self.p}")
        if self.d is not None and self.d < 0:
            raise ValueError(f"d: must be >= 0, got {self.d}")
        if self.steps < 2:
            raise ValueError(f"steps: must be >= 2, got {self.steps}")
        if self.t_max is not None and not self.t_max > 0:
            raise ValueError(f"tmax: must be positive, got {self.t_max}")
        if self.ensemble_size < 1:
            raise ValueError(f"size: ensemble size must be >= 1, got {self.ensemble_size}")
        if self.task not in ENSEMBLE_TASKS:
            raise ValueError(f"task: must be one of {ENSEMBLE_TASKS}, got {self.task!r}")
        if self.jobs < 1:
            raise ValueError(f"jobs: must be >= 1, got {self.jobs}")
        if self.bins < 2:
            raise ValueError(f"bins: must be >= 2, got {self.bins}")
        parse_gamma(self.gamma)
        if self.model is not None and self.model not in ("erdos_renyi", "random_regular", "complete"):
            raise ValueError(f"model: unknown model {self.model!r}")
        self.output_dir = Path(self.output_dir)


def parse_gamma(spec: str) -> tuple[str, float | None]:
    """``auto | exact | meanfield | manual:<x>`` -> ``(gamma_mode, value)``."""
    if spec == "auto":
        return "auto", None
    if spec == "exact":
        return "exact_inverse_lambda1", None
    if spec == "meanfield":
        return "mean_field_inv_np", None
    if spec.startswith("manual:"):
        try:
            value = float(spec.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"gamma: cannot parse manual value in {spec!r}") from None
        if not value > 0:
            raise ValueError(f"gamma: manual value must be positive, got {value}")
        return "manual", value
    raise ValueError(f"gamma: expected exact|meanfield|manual:<x>, got {spec!r}")


def read_config_file(path: str | Path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment. Keys match the
    long CLI flags (dashes or underscores)."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config: line {lineno} of {path} is not 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


# -- graph / instance helpers ------------------------------------------------

def infer_model(cfg: ExperimentConfig) -> str:
    if cfg.model:
        return cfg.model
    if cfg.d is not None:
        return "random_regular"
    if cfg.p is not None:
        return "erdos_renyi"
    return "complete"


def make_graph(cfg: ExperimentConfig, seed: int | None = None) -> graphs.Graph:
    seed = cfg.seed if seed is None else seed
    model = infer_model(cfg)
    if model == "erdos_renyi":
        if cfg.p is None:
            raise ValueError("p: Erdos-Renyi graphs need --p")
        return graphs.erdos_renyi(cfg.n, cfg.p, seed)
    if model == "random_regular":
        if cfg.d is None:
            raise ValueError("d: random regular graphs need --d")
        return graphs.random_regular(cfg.n, cfg.d, seed)
    return graphs.complete(cfg.n)


def make_search_instance(cfg: ExperimentConfig, g: graphs.Graph) -> SearchInstance:
    mode, value = parse_gamma(cfg.gamma)
    if mode == "auto":
        mode = "mean_field_inv_np" if g.model == "erdos_renyi" else "exact_inverse_lambda1"
    return SearchInstance(g, w=cfg.w, gamma=value, gamma_mode=mode)


def make_protocol_spec(cfg: ExperimentConfig, g: graphs.Graph, kind: str) -> ProtocolSpec:
    mode, value = parse_gamma(cfg.gamma)
    gamma = value
    if mode == "exact_inverse_lambda1":
        gamma = 1.0 / adjacency_spectrum(g).lambda1
    if cfg.endpoints:
        return ProtocolSpec(g, kind, cfg.endpoints, gamma=gamma)
    first = cfg.w if kind == "bell" else None
    return ProtocolSpec.auto(g, kind, first=first, gamma=gamma)


# -- io -----------------------------------------------------------------------

def _ensure_dir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"output dir {path}: {exc.strerror}") from exc
    return path


def _clean(v):
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def write_json(path: Path, data) -> Path:
    path.write_text(json.dumps(_clean(data), indent=2) + "\n")
    return path


def write_csv(path: Path, header, rows) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(x)) if not isinstance(x, (int, np.integer)) else str(int(x)) for x in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    rows = Path(path).read_text().splitlines()
    header = rows[0].split(",")
    return header, np.array([[float(x) for x in r.split(",")] for r in rows[1:]])


# -- single-instance commands -----------------------------------------------------

def run_generate(cfg: ExperimentConfig) -> list[Path]:
    out = _ensure_dir(cfg.output_dir)
    g = make_graph(cfg)
    a, b = out / "graph.json", out / "graph.edgelist"
    g.to_json(a)
    g.to_edgelist(b)
    return [a, b]


def run_spectrum(cfg: ExperimentConfig) -> list[Path]:
    out = _ensure_dir(cfg.output_dir)
    g = make_graph(cfg)
    spec = adjacency_spectrum(g)
    try:
        gamma = make_search_instance(cfg, g).gamma
    except ValueError:
        # edgeless graph: no resonant gamma exists, report the raw spectrum
        gamma = 1.0
    rep = spectral_report(g, gamma, spec)
    edges, density = empirical_bulk_density(spec, cfg.bins)
    paths = [out / "spectrum.csv", out / "spectral_report.json", out / "histogram.csv"]
    spec.to_csv(paths[0])
    write_json(paths[1], {"n": g.n, "model": g.model, "seed": g.seed, "param": g.param, "gamma": gamma, **rep.to_dict()})
    histogram_to_csv(edges, density, paths[2])
    return paths


def run_search_command(cfg: ExperimentConfig) -> list[Path]:
    out = _ensure_dir(cfg.output_dir)
    g = make_graph(cfg)
    si = make_search_instance(cfg, g)
    trace = run_search(si, cfg.t_max, cfg.steps)
    paths = [out / "search_trace.csv", out / "search_report.json"]
    trace.to_csv(paths[0])
    write_json(paths[1], search_report(si, trace))
    return paths


def run_protocol_command(cfg: ExperimentConfig, kind: str) -> list[Path]:
    out = _ensure_dir(cfg.output_dir)
    g = make_graph(cfg)
    spec = make_protocol_spec(cfg, g, kind)
    res = (run_transfer if kind == "transfer" else run_bell)(spec, cfg.t_max, cfg.steps)
    paths = [out / f"{kind}_fidelity.csv", out / f"{kind}_summary.json"]
    res.to_csv(paths[0])
    write_json(paths[1], res.summary())
    return paths


# -- ensembles -----------------------------------------------------------------

SUMMARY_KEYS = ("lambda1", "lambda2", "c", "alpha", "peak_value", "peak_time", "fidelity",
                "fidelity_at_predicted_time")


def aggregate(records: list[dict]) -> dict:
    """mean / std (ddof=0) / min / max of every numeric scalar present."""
    ok = [r for r in records if "error" not in r]
    out = {}
    for key in SUMMARY_KEYS:
        vals = [r[key] for r in ok if r.get(key) is not None]
        if not vals:
            continue
        arr = np.array(vals, dtype=float)
        out[key] = {"mean": float(arr.mean()), "std": float(arr.std()),
                    "min": float(arr.min()), "max": float(arr.max()), "count": int(arr.size)}
    return out


@dataclass
class EnsembleSummary:
    records: list[dict]
    aggregate: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.aggregate:
            self.aggregate = aggregate(self.records)

    @property
    def failures(self) -> list[dict]:
        return [r for r in self.records if "error" in r]

    def check(self) -> bool:
        """Aggregates are recomputable from the records."""
        return _clean(aggregate(self.records)) == _clean(self.aggregate)

    def values(self, key: str) -> np.ndarray:
        return np.array([r[key] for r in self.records if "error" not in r and r.get(key) is not None], dtype=float)

    def write(self, out: Path) -> list[Path]:
        _ensure_dir(out)
        lines = out / "ensemble_records.jsonl"
        lines.write_text("".join(json.dumps(_clean(r)) + "\n" for r in self.records))
        agg = write_json(out / "ensemble_aggregate.json", self.aggregate)
        return [lines, agg]

    @classmethod
    def read(cls, out: Path) -> "EnsembleSummary":
        records = [json.loads(x) for x in (Path(out) / "ensemble_records.jsonl").read_text().splitlines() if x]
        agg = json.loads((Path(out) / "ensemble_aggregate.json").read_text())
        return cls(records, agg)


def ensemble_record(cfg: ExperimentConfig, seed: int) -> dict:
    """One ensemble member; failures become ``{"seed", "error"}`` records."""
    try:
        g = make_graph(cfg, seed)
        rec = {"seed": seed}
        if cfg.task in ("spectrum", "search"):
            si = make_search_instance(cfg, g)
            rep = spectral_report(g, si.gamma, si.adjacency_spectrum)
            rec.update(gamma=si.gamma, lambda1=rep.lambda1, lambda2=rep.lambda2, c=rep.ratio_c,
                       alpha=rep.alpha, delocalization_rhs=rep.delocalization_rhs)
            if cfg.task == "search":
                trace = run_search(si, cfg.t_max, cfg.steps)
                rec.update(peak_value=trace.peak_value, peak_time=trace.peak_time)
        else:
            spec = make_protocol_spec(cfg, g, cfg.task)
            res = (run_transfer if cfg.task == "transfer" else run_bell)(spec, cfg.t_max, cfg.steps)
            rec.update(endpoints=list(spec.endpoints), fidelity=res.peak_fidelity,
                       fidelity_at_predicted_time=res.fidelity_at_predicted_time,
                       peak_time=res.trace.peak_time)
        return _clean(rec)
    except Exception as exc:  # recorded per instance, reflected in exit status
        log.warning("ensemble instance seed=%s failed: %s", seed, exc)
        return {"seed": seed, "error": f"{type(exc).__name__}: {exc}"}


def run_ensemble(cfg: ExperimentConfig, write: bool = True) -> EnsembleSummary:
    """Instances use seeds ``seed, seed+1, ..., seed+size-1``."""
    seeds = [cfg.seed + k for k in range(cfg.ensemble_size)]
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(lambda s: ensemble_record(cfg, s), seeds))
    else:
        records = [ensemble_record(cfg, s) for s in seeds]
    summary = EnsembleSummary(records)
    if write:
        summary.write(cfg.output_dir)
    return summary


# -- figures ---------------------------------------------------------------------

def figure1_panel(n: int, p: float, seed: int, w: int = 0, steps: int = DEFAULT_STEPS,
                  t_max: float | None = None) -> dict:
    """Numeric search curve, the resonant prediction and the search
    Hamiltonian spectrum for one G(n, p) draw (``gamma = 1/(np)``)."""
    g = graphs.erdos_renyi(n, p, seed)
    si = SearchInstance(g, w=w, gamma_mode="mean_field_inv_np")
    trace = run_search(si, t_max, steps)
    predicted = grover_probability(trace.times, n)
    pert = perturbation_prediction(n, si.gamma, si.adjacency_spectrum.lambda1)
    window = trace.times <= math.pi * math.sqrt(n) / 2.0
    energies = si.hamiltonian.spectrum.eigenvalues[::-1]
    sep = lowest_pair_separation(energies)
    rep = spectral_report(g, si.gamma, si.adjacency_spectrum)
    return {
        "graph": g,
        "trace": trace,
        "predicted": predicted,
        "perturbative": pert.probability(trace.times),
        "energies": energies,
        "summary": {
            "n": n, "p": p, "seed": seed, "w": w, "gamma": si.gamma,
            "connected": graphs.is_connected(g),
            "peak_value": trace.peak_value, "peak_time": trace.peak_time,
            "max_deviation": float(np.abs(trace.probabilities[window] - predicted[window]).max()),
            "lowest_pair_separated": sep["separated"],
            "lowest_pair_splitting": sep["splitting"], "gap_to_bulk": sep["gap"],
            "lambda1": rep.lambda1, "lambda2": rep.lambda2, "c": rep.ratio_c, "alpha": rep.alpha,
            "predicted_amplitude": pert.amplitude,
        },
    }


def run_figure1(cfg: ExperimentConfig) -> list[Path]:
    out = _ensure_dir(cfg.output_dir)
    paths, summaries = [], []
    for p in cfg.p_list:
        panel = figure1_panel(cfg.n, p, cfg.seed, cfg.w, cfg.steps, cfg.t_max)
        tag = f"p{p!r}"
        tr = panel["trace"]
        paths.append(write_csv(out / f"figure1_{tag}_trace.csv", ("t", "numeric", "predicted", "perturbative"),
                               zip(tr.times, tr.probabilities, panel["predicted"], panel["perturbative"])))
        E = panel["energies"]
        flags = np.zeros(E.size, dtype=int)
        flags[:2] = 1
        paths.append(write_csv(out / f"figure1_{tag}_spectrum.csv", ("index", "energy", "lowest_pair"),
                               ((k, float(e), int(f)) for k, (e, f) in enumerate(zip(E, flags)))))
        summaries.append(panel["summary"])
    paths.append(write_json(out / "figure1_summary.json", summaries))
    return paths


def figure2_result(n: int = 100, p: float = 0.2, seed: int = DEFAULT_SEED, endpoints=None,
                   t_max: float | None = None, steps: int = DEFAULT_STEPS):
    g = graphs.erdos_renyi(n, p, seed)
    spec = ProtocolSpec(g, "transfer", endpoints) if endpoints else ProtocolSpec.auto(g, "transfer")
    return run_transfer(spec, t_max, steps)


def run_figure2(cfg: ExperimentConfig) -> list[Path]:
    out = _ensure_dir(cfg.output_dir)
    res = figure2_result(cfg.n, cfg.p if cfg.p is not None else 0.2, cfg.seed, cfg.endpoints, cfg.t_max, cfg.steps)
    a, b = out / "figure2_fidelity.csv", out / "figure2_summary.json"
    res.to_csv(a)
    write_json(b, res.summary())
    return [a, b]


def read_trace(csv_path: Path, summary_path: Path) -> EvolutionTrace:
    """Rebuild a trace from its CSV and JSON summary."""
    _, data = read_csv(csv_path)
    summ = json.loads(Path(summary_path).read_text())
    return EvolutionTrace(data[:, 0], data[:, 1], summ["peak_value"], summ["peak_time"])


def figure_defaults(cfg: ExperimentConfig, explicit: set[str]) -> ExperimentConfig:
    """Fill figure-specific defaults for parameters the user did not set."""
    if cfg.command == "figure1" and "n" not in explicit:
        cfg = replace(cfg, n=1000)
    if cfg.command == "figure2":
        if "n" not in explicit:
            cfg = replace(cfg, n=100)
        if "p" not in explicit:
            cfg = replace(cfg, p=0.2)
    return cfg


CONFIG_FIELDS = {f.name for f in fields(ExperimentConfig)}
