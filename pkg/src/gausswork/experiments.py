"""Figure-reproduction datasets: random scatters and dense parameter sweeps.

Every dataset is a CSV file. Scatter rows follow the schema in
``SCATTER_COLUMNS``; threshold curves go to a companion ``*.thresholds.csv``
grid file so they can be overlaid on the scatter. Floats are written with 17
significant digits, which round-trips doubles exactly.

Determinism: states come from :func:`gausswork.sampling.sample_random` (keyed
by seed and block index) and are evaluated in fixed chunks of ``EVAL_CHUNK``
rows. A chunk's result depends only on its contents, so the number of worker
processes never changes the output bytes.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParams, QuadratureFailure
from .measurements import GaussianMeasurement
from .sampling import DEFAULT_RANGES, PARAM_NAMES, SampleSet, family_matrices, sample_random
from .states import (
    FAMILIES,
    build_state,
    build_symmetric_mixed_tripartite,
    class_label,
    from_record,
    npt_flags,
    sts_c_max,
    sts_c_sep,
)
from .symplectic import mode_count
from .work import (
    AVG_TOL,
    angle_average,
    separable_bound_general,
    work_avg_angle,
    work_max_sts,
    work_max_symmetric,
    work_one_measurement,
    work_sep_sts,
    work_sep_sigma_prime,
    work_sep_symmetric,
    work_tripartite,
    work_tripartite_avg,
    work_two_measurements,
    work_two_measurements_avg,
)

EVAL_CHUNK = 512
CURVE_POINTS = 201
GRID_POINTS = 41
PARAM_COLUMNS = ("a", "b", "c", "d") + tuple(f"c{i}" for i in range(1, 10))
SCATTER_COLUMNS = ("sample_id", "family") + PARAM_COLUMNS + ("lambda", "phi_policy", "class", "W")
TWO_MODE = ("sym-sts", "sts", "standard")


def fmt(x) -> str:
    """Float formatting used by every CSV writer (17 significant digits)."""
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """One scatter run. Figure presets fill in everything except overrides."""

    family: str
    samples: int
    seed: int = 0
    lambdas: tuple[float, ...] = (0.0,)
    average: bool = False
    ranges: dict = field(default_factory=dict)
    out: str | None = None
    workers: int = 1
    figure: str | None = None
    thresholds: str = "auto"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParams(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.samples <= 0:
            raise InvalidParams("samples must be positive")
        if any(not lam >= 0.0 for lam in self.lambdas):
            raise InvalidParams("measurement strengths must be >= 0")
        if self.workers < 1:
            raise InvalidParams("workers must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambdas"] = list(self.lambdas)
        d["ranges"] = {k: list(v) for k, v in self.ranges.items()}
        return d


BIPARTITE_SAMPLES = 20_000
TRIPARTITE_SAMPLES = 10_000

# Sample counts and ranges are not published; these defaults are documented choices.
FIGURES: dict[str, dict] = {
    "fig2a": dict(family="sym-sts", lambdas=(0.0,)),
    "fig2b": dict(family="sym-sts", lambdas=(1.0,)),
    "fig3a": dict(family="sts", lambdas=(0.0,)),
    "fig3b": dict(family="sts", lambdas=(1.0,)),
    "fig4": dict(family="sts", lambdas=(0.0,), ranges={"b": (0.5, 3.0)}, thresholds="bmax"),
    "fig5": dict(family="standard", lambdas=(3.0,), average=True),
    "fig8a": dict(family="general-tri", lambdas=(0.0,), average=True),
    "fig8d": dict(family="general-tri", lambdas=(1.0,), average=True),
}
FIGURE_ALIASES = {"fig6": "fig8d", "fig6a": "fig8a", "fig6d": "fig8d"}


def default_samples(family: str) -> int:
    return BIPARTITE_SAMPLES if family in TWO_MODE else TRIPARTITE_SAMPLES


def make_config(figure: str | None = None, **overrides) -> ExperimentConfig:
    """Build a config from a figure preset (optional) plus explicit overrides.

    Overrides equal to ``None`` are ignored so argparse defaults can be passed straight through.
    """
    base: dict = {}
    if figure is not None:
        key = FIGURE_ALIASES.get(figure, figure)
        if key not in FIGURES:
            known = ", ".join(sorted(FIGURES) + sorted(FIGURE_ALIASES))
            raise InvalidParams(f"unknown figure {figure!r}; expected one of {known}")
        base = {**FIGURES[key], "figure": key}
    base.update({k: v for k, v in overrides.items() if v is not None})
    if "family" not in base:
        raise InvalidParams("give either a figure id or a family")
    if "lambdas" in base:
        base["lambdas"] = tuple(float(x) for x in np.atleast_1d(base["lambdas"]))
    base["ranges"] = {k: tuple(float(x) for x in v) for k, v in base.get("ranges", {}).items()}
    base.setdefault("samples", default_samples(base["family"]))
    return ExperimentConfig(**base)


# ---------------------------------------------------------------------------
# evaluation


def phi_policy(family: str, lam: float, average: bool) -> str:
    if average:
        if mode_count_of(family) == 3 and lam == 1.0:
            return "invariant"
        return "average"
    return "fixed:0"


def mode_count_of(family: str) -> int:
    return 2 if family in TWO_MODE else 3


def evaluate_work(sigma: np.ndarray, lam: float, average: bool) -> np.ndarray:
    """Work for a stack of states with every demon using strength ``lam`` at angle 0 (or averaged)."""
    m = GaussianMeasurement(lam)
    if mode_count(sigma) == 2:
        res = work_avg_angle(sigma, lam) if average else work_one_measurement(sigma, m)
    elif average:
        res = work_tripartite_avg(sigma, m, m)
    else:
        res = work_tripartite(sigma, m, m)
    return np.atleast_1d(res.value)


def state_classes(sigma: np.ndarray) -> list[str]:
    flags = npt_flags(sigma)
    return [class_label(f).split("[")[0] for f in flags]


def _evaluate_chunk(args) -> tuple[list[str], list[np.ndarray]]:
    family, values, lambdas, average, offset = args
    sigma = family_matrices(family, values)
    classes = state_classes(sigma)
    works = []
    for lam in lambdas:
        try:
            works.append(evaluate_work(sigma, lam, average))
        except QuadratureFailure as exc:
            bad = [offset + i for i in (exc.indices or [])]
            raise QuadratureFailure(f"{exc} (lambda={lam})", bad) from None
    return classes, works


def _chunks(n: int, size: int = EVAL_CHUNK) -> list[slice]:
    return [slice(i, min(i + size, n)) for i in range(0, n, size)]


def _map(func, tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(min(workers, len(tasks))) as pool:
        return list(pool.map(func, tasks))


@dataclass
class ScatterResult:
    config: ExperimentConfig
    samples: SampleSet
    classes: list[str]
    work: dict[float, np.ndarray]

    def rows(self) -> Iterable[list[str]]:
        fam = self.config.family
        for i, rec in enumerate(self.samples.records()):
            params = [fmt(rec.get(name)) for name in PARAM_COLUMNS]
            for lam in self.config.lambdas:
                policy = phi_policy(fam, lam, self.config.average)
                yield [str(i), fam, *params, fmt(lam), policy, self.classes[i], fmt(self.work[lam][i])]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SCATTER_COLUMNS)
        writer.writerows(self.rows())
        return buf.getvalue()


def run_scatter(config: ExperimentConfig) -> ScatterResult:
    """Sample, classify and evaluate; raises :class:`QuadratureFailure` naming the offending row."""
    samples = sample_random(config.family, config.samples, config.seed, config.ranges, workers=config.workers)
    parts = _chunks(len(samples))
    tasks = [(config.family, samples.values[s], config.lambdas, config.average, s.start) for s in parts]
    try:
        results = _map(_evaluate_chunk, tasks, config.workers)
    except QuadratureFailure as exc:
        rows = exc.indices or []
        detail = ""
        if rows:
            rec = dict(zip(samples.names, samples.values[rows[0]].tolist()))
            detail = f"; sample_id={rows[0]} params={rec}"
        raise QuadratureFailure(f"{exc}{detail}", rows) from None
    classes = [c for res in results for c in res[0]]
    work = {lam: np.concatenate([res[1][k] for res in results]) for k, lam in enumerate(config.lambdas)}
    return ScatterResult(config, samples, classes, work)


# ---------------------------------------------------------------------------
# threshold grids


def _range(config: ExperimentConfig, name: str) -> tuple[float, float]:
    return tuple(config.ranges.get(name, DEFAULT_RANGES[config.family].get(name, (0.5, 5.0))))


def threshold_grid(config: ExperimentConfig, points: int = GRID_POINTS) -> tuple[list[str], list[list]]:
    """Header and rows of the threshold curves (1-D in ``a``) or surfaces (2-D in ``a``, ``b``)."""
    fam = config.family
    a_lo, a_hi = _range(config, "a")
    a_grid = np.linspace(a_lo, a_hi, CURVE_POINTS if fam != "sts" or config.thresholds == "bmax" else points)
    rows: list[list] = []
    if fam == "sym-sts":
        header = ["a", "lambda", "W_sep", "W_max"]
        for lam in config.lambdas:
            rows += [[a, lam, work_sep_symmetric(a, lam).value, work_max_symmetric(a).value] for a in a_grid]
    elif fam == "sts" and config.thresholds == "bmax":
        b_max = _range(config, "b")[1]
        header = ["a", "lambda", "b_max", "W_sep_at_b_max", "W_max_at_b_eq_a"]
        for lam in config.lambdas:
            rows += [[a, lam, b_max, work_sep_sts(a, b_max, lam).value, work_max_sts(a, a, lam).value] for a in a_grid]
    elif fam in ("sts", "standard"):
        b_lo, b_hi = _range(config, "b")
        b_grid = np.linspace(b_lo, b_hi, points)
        aa, bb = (x.ravel() for x in np.meshgrid(a_grid, b_grid, indexing="ij"))
        for lam in config.lambdas:
            w_max = work_max_sts(aa, bb, lam).value
            if fam == "sts":
                header = ["a", "b", "lambda", "W_sep", "W_max"]
                w_sep = work_sep_sts(aa, bb, lam).value
                rows += [[a, b, lam, s, m] for a, b, s, m in zip(aa, bb, w_sep, w_max)]
            else:
                header = ["a", "b", "lambda", "W_sep", "W_sep_sts", "W_sep_sigma_prime", "W_max"]
                sts_part = work_sep_sts(aa, bb, lam).value
                bound = separable_bound_general(aa, bb, lam).value
                prime = _sigma_prime_part(aa, bb, lam)
                rows += [list(r) for r in zip(aa, bb, [lam] * len(aa), bound, sts_part, prime, w_max)]
    else:
        header = ["a", "W_max"]
        rows = [[a, math.log(2 * a)] for a in a_grid]
    return header, rows


def _sigma_prime_part(a, b, lam):
    return angle_average(lambda phi: work_sep_sigma_prime(a[..., None], b[..., None], lam, phi).value, 1, AVG_TOL, period=np.pi)


def write_csv(path: str | Path | None, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([fmt(x) for x in row] for row in rows)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def companion_path(out: str | Path) -> Path:
    out = Path(out)
    stem = out.name[: -len(out.suffix)] if out.suffix else out.name
    return out.with_name(stem + ".thresholds.csv")


def scatter(config: ExperimentConfig) -> tuple[str, ScatterResult]:
    """Run a scatter config and write the dataset (and threshold grid) when ``config.out`` is set."""
    result = run_scatter(config)
    text = result.to_csv()
    if config.out is not None:
        Path(config.out).write_text(text)
        header, rows = threshold_grid(config)
        write_csv(companion_path(config.out), header, rows)
    return text, result


def load_scatter(path: str | Path) -> list[dict]:
    """Read a scatter CSV back; parameter cells become floats (absent ones are dropped)."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rec = {"family": row["family"], "sample_id": int(row["sample_id"])}
            rec.update({k: float(row[k]) for k in PARAM_COLUMNS if row[k] != ""})
            rec.update({"lambda": float(row["lambda"]), "phi_policy": row["phi_policy"], "class": row["class"], "W": float(row["W"])})
            out.append(rec)
    return out


def reload_states(records: list[dict]) -> list[np.ndarray]:
    """Rebuild and validate the covariance matrix of every loaded row."""
    return [build_state(from_record(r)) for r in records]


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepSpec:
    """Dense one-parameter scan. ``vary`` names the parameter; ``params`` fixes the rest."""

    family: str
    vary: str
    lo: float
    hi: float
    points: int = CURVE_POINTS
    params: dict = field(default_factory=dict)
    lambdas: tuple[float, ...] = (0.0,)
    average: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParams(f"unknown family {self.family!r}")
        if self.vary not in PARAM_NAMES[self.family]:
            raise InvalidParams(f"{self.family} has no parameter {self.vary!r}; expected one of {PARAM_NAMES[self.family]}")
        if self.points < 2:
            raise InvalidParams("a sweep needs at least two points")


SWEEPS = ("fig2c", "fig6", "fig7")


def _sweep_states(spec: SweepSpec) -> tuple[np.ndarray, np.ndarray]:
    xs = np.linspace(spec.lo, spec.hi, spec.points)
    mats = []
    for x in xs:
        rec = {"family": spec.family, **spec.params, spec.vary: float(x)}
        mats.append(build_state(from_record(rec)))
    return xs, np.stack(mats)


def run_sweep(spec: SweepSpec) -> tuple[list[str], list[list]]:
    xs, mats = _sweep_states(spec)
    rows = []
    for lam in spec.lambdas:
        w = evaluate_work(mats, lam, spec.average)
        label = f"lambda={fmt(lam)}" + (":average" if spec.average else "")
        rows += [[label, x, v] for x, v in zip(xs, w)]
    return ["curve", "x", "W"], rows


def sweep_fig2c(points: int = CURVE_POINTS, a: float = 3.0) -> tuple[list[str], list[list], list[list]]:
    """W against c at fixed a for lambda = 1, 5, 0, with c_sep and W_sep as reference lines."""
    spec = SweepSpec("sym-sts", "c", 0.0, float(sts_c_max(a, a)), points, {"a": a}, (1.0, 5.0, 0.0))
    header, rows = run_sweep(spec)
    refs = [["c_sep", float(sts_c_sep(a, a))]]
    refs += [[f"W_sep:lambda={fmt(lam)}", work_sep_symmetric(a, lam).value] for lam in spec.lambdas]
    refs += [["W_max", work_max_symmetric(a).value]]
    return header, rows, refs


def sweep_fig6(points: int = CURVE_POINTS, a: float = 3.0) -> tuple[list[str], list[list], list[list]]:
    """Two-measurement work against c: W(1,1), angle-averaged W(0,0), and single W(1), W(0)."""
    cs = np.linspace(0.0, float(sts_c_max(a, a)), points)
    mats = np.stack([build_state(from_record({"family": "sym-sts", "a": a, "c": float(c)})) for c in cs])
    het, hom = GaussianMeasurement(1.0), GaussianMeasurement(0.0)
    curves = {
        "W11": work_two_measurements(mats, het, het).value,
        "W00:average": work_two_measurements_avg(mats, hom, hom).value,
        "W1": work_one_measurement(mats, het).value,
        "W0": work_one_measurement(mats, hom).value,
    }
    rows = [[name, c, v] for name, vals in curves.items() for c, v in zip(cs, vals)]
    return ["curve", "x", "W"], rows, [["c_sep", float(sts_c_sep(a, a))]]


def sweep_fig7(points: int = 96, a_lo: float = 0.5, a_hi: float = 10.0) -> tuple[list[str], list[list], list[list]]:
    """Symmetric mixed tripartite state: heterodyne, angle-averaged homodyne, and the pure-state value ln 2a."""
    a_grid = np.linspace(a_lo, a_hi, points)
    mats = np.stack([build_symmetric_mixed_tripartite(float(a)) for a in a_grid])
    het = evaluate_work(mats, 1.0, False)
    hom = evaluate_work(mats, 0.0, True)
    rows = [["heterodyne", a, v] for a, v in zip(a_grid, het)]
    rows += [["homodyne:average", a, v] for a, v in zip(a_grid, hom)]
    rows += [["pure", a, math.log(2 * a)] for a in a_grid]
    return ["curve", "x", "W"], rows, []


def named_sweep(name: str, points: int | None = None):
    funcs = {"fig2c": sweep_fig2c, "fig6": sweep_fig6, "fig7": sweep_fig7}
    if name not in funcs:
        raise InvalidParams(f"unknown sweep {name!r}; expected one of {', '.join(SWEEPS)}")
    return funcs[name]() if points is None else funcs[name](points)


def sweep(name: str | None = None, spec: SweepSpec | None = None, out: str | None = None, points: int | None = None) -> str:
    """Run a named or custom sweep; writes ``out`` (and ``*.thresholds.csv`` reference values) when given."""
    if (name is None) == (spec is None):
        raise InvalidParams("give exactly one of a sweep name or a custom sweep spec")
    if name is not None:
        header, rows, refs = named_sweep(name, points)
    else:
        if points is not None:
            spec = replace(spec, points=points)
        header, rows = run_sweep(spec)
        refs = []
    text = write_csv(out, header, rows)
    if out is not None and refs:
        write_csv(companion_path(out), ["name", "value"], refs)
    return text


__all__ = [
    "EVAL_CHUNK", "FIGURES", "FIGURE_ALIASES", "SCATTER_COLUMNS", "SWEEPS",
    "ExperimentConfig", "ScatterResult", "SweepSpec",
    "companion_path", "evaluate_work", "fmt", "load_scatter", "make_config", "named_sweep",
    "reload_states", "run_scatter", "run_sweep", "scatter", "state_classes", "sweep",
    "sweep_fig2c", "sweep_fig6", "sweep_fig7", "threshold_grid",
]  # fmt: skip
