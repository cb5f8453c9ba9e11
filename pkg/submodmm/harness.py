"""
Experiment runner for lattice pruning, constrained minimization and
maximization comparisons.

An experiment is described by a JSON spec and expands into a grid of
instances. Each instance is solved independently (optionally in worker
processes) and produces one CSV row; rows are also averaged into summary rows.
"""

import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import config
from .core import ArgumentError
from .functions import canonical_family, random_instance
from .graphs import GENERATORS, generate
from .linopt import GRAPH_KINDS, ConstraintFamily, random_feasible_set
from .mmax import SCHEDULE_NAMES, ScheduleConfig, maximize
from .mmin import constrained_mmin, lattice_summary
from .oracle import brute_maximize, brute_minimize, verify_lattice_claims

logger = logging.getLogger(__name__)

EXPERIMENT_KINDS = ("lattice_reduction", "constrained_min", "max_comparison")
RANDOMIZED_SCHEDULES = ("rp", "ra", "rls", "rg", "rs")
DEFAULT_REPETITIONS = 5
BOUND_SLACK = 1e-6

# Per-instance guarantees checked in the ok column, as functions of eta
DETERMINISTIC_FACTORS = {"bg": lambda eta: 1.0 / 3.0, "dls": lambda eta: 1.0 / 3.0 - eta}


@dataclass
class ExperimentSpec:
    """
    A serializable experiment grid.

    Attributes:
        name: Used for output file names
        kind: One of EXPERIMENT_KINDS
        families: Function family names or short codes
        n_values: Ground set sizes (ignored for constrained_min, where the constraint fixes n)
        seeds: Instance seeds
        params: Family parameters shared by all instances
        lam_values: Optional sweep over the family's lam parameter
        algorithms: Schedules for max_comparison
        constraints: Constraint descriptors for constrained_min
        repetitions: Best-of-r for randomized schedules
        eta: Acceptance threshold for MMax
        brute_force: Certify against exhaustive enumeration
        timing: Add a wall_time_s column
    """

    name: str
    kind: str
    families: List[str]
    n_values: List[int] = field(default_factory=list)
    seeds: List[int] = field(default_factory=lambda: [0])
    params: Dict[str, Any] = field(default_factory=dict)
    lam_values: Optional[List[float]] = None
    algorithms: List[str] = field(default_factory=list)
    constraints: List[Dict[str, Any]] = field(default_factory=list)
    repetitions: int = DEFAULT_REPETITIONS
    eta: float = 0.01
    brute_force: bool = True
    timing: bool = False

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ArgumentError(f"Unknown experiment kind '{self.kind}'. Known kinds: {', '.join(EXPERIMENT_KINDS)}")
        if not self.families:
            raise ArgumentError("Experiment needs at least one function family")
        for family in self.families:
            canonical_family(family)
        if not self.seeds:
            raise ArgumentError("Experiment needs at least one seed")
        if self.kind != "constrained_min" and not self.n_values:
            raise ArgumentError(f"{self.kind} experiment needs n_values")
        if self.kind == "constrained_min" and not self.constraints:
            raise ArgumentError("constrained_min experiment needs at least one constraint")
        if self.kind == "max_comparison":
            if not self.algorithms:
                raise ArgumentError("max_comparison experiment needs algorithms")
            for schedule in self.algorithms:
                if schedule.lower() not in SCHEDULE_NAMES:
                    raise ArgumentError(f"Unknown schedule '{schedule}'. Known schedules: {', '.join(SCHEDULE_NAMES)}")
        if self.repetitions < 1:
            raise ArgumentError(f"repetitions must be at least 1, got {self.repetitions}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentSpec":
        """
        Build a spec from JSON.

        Seeds are given either as a ``seeds`` list or as ``instances`` with an
        optional base ``seed``.
        """
        if not isinstance(data, dict):
            raise ArgumentError("Experiment spec must be a JSON object")
        missing = [key for key in ("name", "kind") if key not in data]
        if missing:
            raise ArgumentError(f"Experiment spec is missing required fields: {', '.join(missing)}")
        families = data.get("families")
        if families is None and "family" in data:
            families = [data["family"]]
        seeds = data.get("seeds")
        if seeds is None:
            base = int(data.get("seed", 0))
            seeds = list(range(base, base + int(data.get("instances", 1))))
        n_values = data.get("n_values")
        if n_values is None and "n" in data:
            n_values = [data["n"]]
        return cls(
            name=str(data["name"]),
            kind=data["kind"],
            families=list(families or []),
            n_values=[int(n) for n in n_values or []],
            seeds=[int(s) for s in seeds],
            params=dict(data.get("params") or {}),
            lam_values=[float(x) for x in data["lam_values"]] if data.get("lam_values") is not None else None,
            algorithms=list(data.get("algorithms") or []),
            constraints=list(data.get("constraints") or []),
            repetitions=int(data.get("repetitions", DEFAULT_REPETITIONS)),
            eta=float(data.get("eta", 0.01)),
            brute_force=bool(data.get("brute_force", True)),
            timing=bool(data.get("timing", False)),
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentSpec":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Experiment spec not found: {path}")
        with open(path, "r") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ArgumentError(f"Invalid JSON in {path}: {e}") from e
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


@dataclass
class ExperimentResult:
    """Per-instance rows and their averages."""

    spec: ExperimentSpec
    rows: List[Dict[str, Any]]
    summary: List[Dict[str, Any]]

    @property
    def passed(self) -> bool:
        return all(row.get("ok", True) for row in self.rows)

    @property
    def failures(self) -> List[Dict[str, Any]]:
        return [row for row in self.rows if not row.get("ok", True)]


def build_constraint(descriptor: Dict[str, Any], seed: Optional[int] = 0) -> ConstraintFamily:
    """
    Build a constraint from an experiment descriptor.

    Graph kinds accept ``{"kind", "generator", "args"}`` where generator names
    one of graphs.GENERATORS, or a literal ``graph`` object. Random generators
    draw from the instance seed.
    """
    kind = descriptor.get("kind")
    if kind in GRAPH_KINDS and "generator" in descriptor:
        generator = descriptor["generator"]
        if generator not in GENERATORS:
            raise ArgumentError(f"Unknown graph generator '{generator}'. Known: {', '.join(sorted(GENERATORS))}")
        args = list(descriptor.get("args") or [])
        kwargs = dict(descriptor.get("kwargs") or {})
        if generator == "bipartite_sparse":
            kwargs["rng"] = np.random.default_rng(seed)
        graph = generate(generator, *args, **kwargs)
        return ConstraintFamily(kind, graph.n, graph=graph)
    return ConstraintFamily.from_dict(descriptor)


def _constraint_label(C: ConstraintFamily) -> str:
    if C.graph is not None:
        return C.graph.name or f"graph_{C.graph.n}"
    if C.k is not None:
        return f"k={C.k}"
    return ""


def _lam_grid(spec: ExperimentSpec) -> List[Optional[float]]:
    return list(spec.lam_values) if spec.lam_values else [None]


def _instance_params(spec: ExperimentSpec, lam: Optional[float]) -> Dict[str, Any]:
    params = dict(spec.params)
    if lam is not None:
        params["lam"] = lam
    return params


Task = Tuple[Any, ...]


def _tasks(spec: ExperimentSpec) -> List[Task]:
    if spec.kind == "constrained_min":
        return [
            (family, index, seed)
            for family in spec.families
            for index in range(len(spec.constraints))
            for seed in spec.seeds
        ]
    return [
        (family, n, lam, seed)
        for family in spec.families
        for n in spec.n_values
        for lam in _lam_grid(spec)
        for seed in spec.seeds
    ]


def _lattice_rows(spec: ExperimentSpec, task: Task) -> List[Dict[str, Any]]:
    family, n, lam, seed = task
    f = random_instance(family, n, seed, _instance_params(spec, lam))
    summary = lattice_summary(f)
    row = {
        "family": canonical_family(family),
        "n": n,
        "lam": lam,
        "seed": seed,
        "size_A": summary.A.cardinality,
        "size_B": summary.B.cardinality,
        "size_A_plus": summary.A_plus.cardinality,
        "size_B_plus": summary.B_plus.cardinality,
        "width_mmin3": summary.outer.width,
        "width_mmin12": summary.inner.width,
        "reduction_pct": summary.inner.reduction_pct,
        "reduction_pct_mmin3": summary.outer.reduction_pct,
        "oracle_calls": summary.oracle_calls,
    }
    nested = summary.A.issubset(summary.A_plus) and summary.B_plus.issubset(summary.B)
    if spec.brute_force and n <= config.MEMBERSHIP_LIMIT:
        certificate = verify_lattice_claims(f)
        sizes = [len(X) for X in certificate.minimizers]
        row["min_size_x_star"] = min(sizes)
        row["max_size_x_star"] = max(sizes)
        row["ok"] = nested and certificate.passed
    else:
        row["ok"] = nested
    return [row]


def _planted_params(family: str, C: ConstraintFamily, seed: int, params: Dict[str, Any]) -> Dict[str, Any]:
    params = dict(params)
    name = canonical_family(family)
    if name in ("best_set", "worst_case") and "R" not in params:
        R = random_feasible_set(C, np.random.default_rng(seed))
        params["R"] = R.to_external()
    if name == "best_set":
        params.setdefault("mode", "monotone")
    return params


def _ratio(value: float, optimum: Optional[float]) -> Optional[float]:
    if optimum is None:
        return None
    if abs(optimum) <= config.TOLERANCE:
        return 1.0
    return value / optimum


def _constrained_rows(spec: ExperimentSpec, task: Task) -> List[Dict[str, Any]]:
    family, index, seed = task
    C = build_constraint(spec.constraints[index], seed)
    f = random_instance(family, C.n, seed, _planted_params(family, C, seed, spec.params))
    reference = brute_minimize(f, C) if spec.brute_force else None
    calls_before = f.eval_count
    report = constrained_mmin(f, C, reference=reference)
    optimum = reference.optimum_value if reference is not None else None
    row = {
        "family": canonical_family(family),
        "constraint": C.kind,
        "structure": _constraint_label(C),
        "n": C.n,
        "seed": seed,
        "value": report.value,
        "mu_value": report.mu_value,
        "optimum": optimum,
        "factor": report.factor,
        "mu_factor": _ratio(report.mu_value, optimum),
        "curvature": report.curvature,
        "bound": report.curvature_bound,
        "sharp_bound": report.sharp_bound,
        "iterations": report.iterations,
        "oracle_calls": f.eval_count - calls_before,
    }
    ok = report.value <= report.mu_value + BOUND_SLACK
    if optimum is not None and report.sharp_bound is not None:
        ok = ok and report.value <= report.sharp_bound * optimum + BOUND_SLACK
    row["ok"] = bool(ok)
    return [row]


def _max_rows(spec: ExperimentSpec, task: Task) -> List[Dict[str, Any]]:
    family, n, lam, seed = task
    f = random_instance(family, n, seed, _instance_params(spec, lam))
    reference = brute_maximize(f) if spec.brute_force else None
    rows = []
    for schedule in spec.algorithms:
        key = schedule.lower()
        repetitions = spec.repetitions if key in RANDOMIZED_SCHEDULES else 1
        cfg = ScheduleConfig(eta=spec.eta, seed=seed, repetitions=repetitions)
        calls_before = f.eval_count
        report = maximize(f, key, cfg, reference=reference)
        row = {
            "family": canonical_family(family),
            "n": n,
            "lam": lam,
            "seed": seed,
            "schedule": key,
            "value": report.value,
            "optimum": reference.optimum_value if reference is not None else None,
            "factor": report.factor_certificate,
            "iterations": report.iterations,
            "oracle_calls": f.eval_count - calls_before,
        }
        ok = report.iterations <= cfg.iteration_cap(n)
        if reference is not None:
            ok = ok and report.value <= reference.optimum_value + BOUND_SLACK
            if key in DETERMINISTIC_FACTORS and report.factor_certificate is not None:
                ok = ok and report.factor_certificate >= DETERMINISTIC_FACTORS[key](spec.eta) - BOUND_SLACK
        row["ok"] = bool(ok)
        rows.append(row)
    return rows


ROW_BUILDERS = {
    "lattice_reduction": _lattice_rows,
    "constrained_min": _constrained_rows,
    "max_comparison": _max_rows,
}

# (group keys, averaged columns, direction in which factors get worse)
SUMMARY_KEYS = {
    "lattice_reduction": (
        ("family", "n", "lam"),
        ("reduction_pct", "reduction_pct_mmin3", "width_mmin12", "width_mmin3", "oracle_calls"),
        "max",
    ),
    "constrained_min": (("family", "constraint", "structure"), ("factor", "mu_factor", "oracle_calls"), "max"),
    "max_comparison": (("family", "n", "lam", "schedule"), ("factor", "value", "oracle_calls"), "min"),
}


def _solve_task(spec: ExperimentSpec, task: Task) -> List[Dict[str, Any]]:
    logger.debug("Running %s task %s", spec.kind, task)
    start = time.perf_counter()
    rows = ROW_BUILDERS[spec.kind](spec, task)
    if spec.timing:
        elapsed = time.perf_counter() - start
        for row in rows:
            row["wall_time_s"] = elapsed / len(rows)
    return rows


def _solve_packed(args: Tuple[ExperimentSpec, Task]) -> List[Dict[str, Any]]:
    return _solve_task(*args)


def summarize(
    rows: Sequence[Dict[str, Any]], group_keys: Sequence[str], value_keys: Sequence[str], worst: str = "max"
) -> List[Dict[str, Any]]:
    """
    Average value_keys over rows sharing group_keys, in first-seen group order.

    Each summary row also carries the instance count, the number of failed
    rows and, for factor columns, the worst observed value (the largest when
    ``worst`` is "max", the smallest when "min").
    """
    pick = max if worst == "max" else min
    groups: Dict[Tuple[Any, ...], List[Dict[str, Any]]] = {}
    for row in rows:
        groups.setdefault(tuple(row.get(k) for k in group_keys), []).append(row)
    summary = []
    for key, members in groups.items():
        out = dict(zip(group_keys, key))
        out["instances"] = len(members)
        for name in value_keys:
            values = [row[name] for row in members if row.get(name) is not None]
            out[f"mean_{name}"] = float(np.mean(values)) if values else None
            if "factor" in name:
                out[f"worst_{name}"] = float(pick(values)) if values else None
        out["failures"] = sum(1 for row in members if not row.get("ok", True))
        summary.append(out)
    return summary


def run_experiment(spec: ExperimentSpec, jobs: Optional[int] = None) -> ExperimentResult:
    """
    Run every instance of the grid and collect rows in grid order.

    Args:
        spec: The experiment
        jobs: Worker processes (defaults to config.JOBS); 1 runs in-process

    Returns:
        ExperimentResult with rows and averaged summary rows
    """
    jobs = config.JOBS if jobs is None else jobs
    if jobs < 1:
        raise ArgumentError(f"jobs must be at least 1, got {jobs}")
    tasks = _tasks(spec)
    logger.info("Experiment %s: %d instances, %d worker(s)", spec.name, len(tasks), jobs)
    if jobs == 1 or len(tasks) <= 1:
        chunks = [_solve_task(spec, task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_solve_packed, [(spec, task) for task in tasks]))
    rows = [row for chunk in chunks for row in chunk]
    group_keys, value_keys, worst = SUMMARY_KEYS[spec.kind]
    return ExperimentResult(spec, rows, summarize(rows, group_keys, value_keys, worst))


def _run_kind(spec: ExperimentSpec, kind: str, jobs: Optional[int]) -> ExperimentResult:
    if spec.kind != kind:
        raise ArgumentError(f"Expected a {kind} experiment, got {spec.kind}")
    return run_experiment(spec, jobs)


def run_lattice_reduction(spec: ExperimentSpec, jobs: Optional[int] = None) -> ExperimentResult:
    """Lattice sizes |B| - |A| and |B+| - |A+|, reduction percentages and oracle calls per instance."""
    return _run_kind(spec, "lattice_reduction", jobs)


def run_constrained_min(spec: ExperimentSpec, jobs: Optional[int] = None) -> ExperimentResult:
    """Constrained MMin against the first-iterate baseline and brute force, with curvature bounds."""
    return _run_kind(spec, "constrained_min", jobs)


def run_max_comparison(spec: ExperimentSpec, jobs: Optional[int] = None) -> ExperimentResult:
    """Empirical approximation factors of the MMax schedules and the random-set baseline."""
    return _run_kind(spec, "max_comparison", jobs)


def _format(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def write_csv(rows: Sequence[Dict[str, Any]], path: Union[str, Path]) -> Path:
    """
    Write rows to CSV with columns in first-seen order.

    Missing and None cells are empty; floats use repr so output is reproducible.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=columns, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _format(v) for k, v in row.items()})
    return path


def write_result(result: ExperimentResult, out_dir: Union[str, Path]) -> Tuple[Path, Path]:
    """Write ``<name>.csv`` and ``<name>_summary.csv`` into out_dir."""
    out_dir = Path(out_dir)
    rows_path = write_csv(result.rows, out_dir / f"{result.spec.name}.csv")
    summary_path = write_csv(result.summary, out_dir / f"{result.spec.name}_summary.csv")
    return rows_path, summary_path
