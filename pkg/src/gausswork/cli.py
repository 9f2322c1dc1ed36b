"""Command-line interface: ``gausswork {work,classify,scatter,sweep}``.

Exit codes: 0 on success, 2 on invalid or unphysical input, 3 when an angle
average fails to converge.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import QuadratureFailure
from .experiments import SWEEPS, SweepSpec, make_config, scatter, sweep
from .measurements import GaussianMeasurement
from .sampling import PARAM_NAMES
from .states import (
    FAMILIES,
    SqueezedThermalParams,
    TwoModeStandardForm,
    build_state,
    classify,
    from_record,
    to_record,
)
from .symplectic import as_covariance, is_physical, mode_count, symplectic_eigenvalues
from .work import (
    thresholds,
    witness,
    work_avg_angle,
    work_one_measurement,
    work_sts_closed,
    work_tripartite,
    work_tripartite_avg,
    work_two_measurements,
    work_two_measurements_avg,
)

EXIT_INVALID = 2
EXIT_QUADRATURE = 3
STATE_FIELDS = ("a", "b", "c", "d") + tuple(f"c{i}" for i in range(1, 10))


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# state input


def _add_state_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("state")
    g.add_argument("--family", choices=FAMILIES)
    for name in STATE_FIELDS:
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--matrix", metavar="FILE", help="4x4 or 6x6 covariance matrix (JSON array or whitespace text)")


def load_matrix(path: str) -> np.ndarray:
    text = Path(path).read_text()
    try:
        entries = json.loads(text)
    except json.JSONDecodeError:
        entries = np.loadtxt(path, ndmin=2)
    sigma = as_covariance(entries)
    if sigma.ndim != 2 or mode_count(sigma) not in (2, 3):
        raise UsageError(f"{path}: expected a single 4x4 or 6x6 matrix, got shape {sigma.shape}")
    if not is_physical(sigma):
        try:
            nu = float(symplectic_eigenvalues(sigma)[-1])
            raise UsageError(f"{path}: unphysical, smallest symplectic eigenvalue {nu:.6g} < 1/2")
        except ValueError as exc:
            raise UsageError(f"{path}: unphysical ({exc})") from None
    return sigma


def resolve_state(args) -> tuple[object | None, np.ndarray]:
    """Parameter record (``None`` for a matrix file) and validated covariance matrix."""
    given = {k: getattr(args, k) for k in STATE_FIELDS if getattr(args, k, None) is not None}
    if args.matrix is not None:
        if args.family is not None or given:
            raise UsageError("--matrix cannot be combined with --family or parameter flags")
        return None, load_matrix(args.matrix)
    if args.family is None:
        raise UsageError("give --family with its parameters, or --matrix FILE")
    needed = PARAM_NAMES[args.family]
    missing = [k for k in needed if k not in given]
    extra = sorted(set(given) - set(needed) - ({"b", "d"} if args.family in ("sym-sts", "sts") else set()))
    if missing:
        raise UsageError(f"family {args.family} needs --{' --'.join(missing)}")
    if extra:
        raise UsageError(f"family {args.family} does not take --{' --'.join(extra)}")
    params = from_record({"family": args.family, **given})
    return params, build_state(params)


# ---------------------------------------------------------------------------
# work


def _measurement(lam: float, phi: float) -> GaussianMeasurement:
    return GaussianMeasurement(float(lam), float(phi))


def compute_work(args, params, sigma: np.ndarray) -> dict:
    """Work plus thresholds and verdicts as a JSON-ready dict."""
    m_b = _measurement(args.lam, args.phi)
    n = mode_count(sigma)
    two_meas = args.lambda_a is not None
    if n == 2:
        if two_meas:
            m_a = _measurement(args.lambda_a, args.phi_a)
            res = work_two_measurements_avg(sigma, m_b, m_a) if args.average else work_two_measurements(sigma, m_b, m_a)
        else:
            res = work_avg_angle(sigma, m_b.strength) if args.average else work_one_measurement(sigma, m_b)
    else:
        if two_meas:
            raise UsageError("Alice's measurement flags apply to two-mode states only")
        lam_c = args.lam if args.lambda_c is None else args.lambda_c
        m_c = _measurement(lam_c, args.phi_c)
        res = work_tripartite_avg(sigma, m_b, m_c) if args.average else work_tripartite(sigma, m_b, m_c)

    verdict = classify(sigma)
    out = res.to_dict()
    if params is not None:
        out["state"] = to_record(params)
    out["ppt"] = verdict.to_dict()
    out["W_sep"] = out["W_max"] = out["witness"] = None

    if params is None or two_meas:
        return out
    th = thresholds(params, m_b.strength)
    out["W_max"] = th.get("W_max")
    if isinstance(params, SqueezedThermalParams):
        out["W_closed"] = float(work_sts_closed(params.a, params.b, params.c, m_b.strength))
        out["W_sep"] = th["W_sep"]
        out["witness"] = witness(out["W"], th["W_sep"])
    elif isinstance(params, TwoModeStandardForm):
        out["W_sep"] = th["W_sep"]
        if args.average:
            out["witness"] = witness(out["W"], th["W_sep"], necessary=False)
        else:
            out["note"] = "the separable bound applies to angle-averaged work; pass --average for a verdict"
    return out


def _num(x) -> str:
    return "n/a" if x is None else f"{x:.6f}"


def summary_line(info: dict) -> str:
    parts = [f"W={_num(info['W'])}"]
    if info.get("W_sep") is not None:
        parts.append(f"W_sep={_num(info['W_sep'])}")
    if info.get("W_max") is not None:
        parts.append(f"W_max={_num(info['W_max'])}")
    head = ", ".join(parts)
    ppt = info["ppt"]
    tail = f"PPT: {ppt['label']}"
    if info.get("witness") is not None:
        return f"{head}, verdict: {info['witness']} ({tail})"
    return f"{head}, {tail}"


def cmd_work(args) -> int:
    params, sigma = resolve_state(args)
    info = compute_work(args, params, sigma)
    print(summary_line(info))
    print(json.dumps(info, sort_keys=True))
    return 0


def cmd_classify(args) -> int:
    params, sigma = resolve_state(args)
    out = classify(sigma).to_dict()
    if params is not None:
        out["state"] = to_record(params)
    out["symplectic_eigenvalues"] = symplectic_eigenvalues(sigma).tolist()
    print(json.dumps(out, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# scatter and sweep


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    cfg = json.loads(Path(path).read_text())
    if not isinstance(cfg, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    if "lambda" in cfg:
        cfg["lambdas"] = cfg.pop("lambda")
    return cfg


def cmd_scatter(args) -> int:
    cfg = _load_config(args.config)
    ranges = dict(cfg.pop("ranges", {}))
    for name, lo, hi in args.range or []:
        ranges[name] = (float(lo), float(hi))
    figure = args.figure if args.figure is not None else cfg.pop("figure", None)
    cfg.pop("figure", None)
    overrides = {
        "family": args.family,
        "samples": args.samples,
        "seed": args.seed,
        "lambdas": args.lam,
        "average": True if args.average else None,
        "out": args.out,
        "workers": args.workers,
    }
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    if ranges:
        cfg["ranges"] = ranges
    config = make_config(figure, **cfg)
    text, result = scatter(config)
    if config.out is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(result.classes)} states ({len(config.lambdas)} lambda) to {config.out}; "
              f"acceptance {result.samples.acceptance_rate:.3g}", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    name = args.name or args.figure or cfg.pop("name", None) or cfg.pop("figure", None)
    out = args.out if args.out is not None else cfg.get("out")
    points = args.points if args.points is not None else cfg.get("points")
    if name is not None:
        text = sweep(name=name, out=out, points=points)
    else:
        family = args.family or cfg.get("family")
        vary = args.vary or cfg.get("vary")
        bounds = args.range or cfg.get("range")
        if family is None or vary is None or bounds is None:
            raise UsageError(f"give a sweep name ({', '.join(SWEEPS)}) or --family, --vary and --range LO HI")
        fixed = dict(cfg.get("params", {}))
        fixed.update({k: getattr(args, k) for k in STATE_FIELDS if getattr(args, k) is not None})
        lams = args.lam if args.lam is not None else cfg.get("lambdas", cfg.get("lambda", [0.0]))
        spec = SweepSpec(
            family, vary, float(bounds[0]), float(bounds[1]),
            params=fixed, lambdas=tuple(float(x) for x in np.atleast_1d(lams)),
            average=bool(args.average or cfg.get("average", False)),
        )  # fmt: skip
        text = sweep(spec=spec, out=out, points=points)
    if out is None:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gausswork",
        description="Work extraction from Gaussian states as an entanglement witness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("work", help="work extracted from one state, with thresholds and verdicts")
    _add_state_args(p)
    g = p.add_argument_group("measurements")
    g.add_argument("--lambda", dest="lam", type=float, default=0.0, help="Bob's strength (0 homodyne, 1 heterodyne, inf)")
    g.add_argument("--phi", type=float, default=0.0, help="Bob's angle in radians")
    g.add_argument("--lambda-c", type=float, help="Charlie's strength (defaults to --lambda)")
    g.add_argument("--phi-c", type=float, default=0.0)
    g.add_argument("--lambda-a", type=float, help="Alice also measures with this strength")
    g.add_argument("--phi-a", type=float, default=0.0)
    g.add_argument("--average", action="store_true", help="average over every angle that matters")
    p.set_defaults(func=cmd_work)

    p = sub.add_parser("classify", help="PPT verdict for every single-mode bipartition")
    _add_state_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("scatter", help="random-state dataset for a figure or a custom family")
    p.add_argument("--figure", help="figure preset, e.g. fig2a, fig5, fig8a (fig6 is an alias of fig8d)")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda", dest="lam", type=float, nargs="+")
    p.add_argument("--average", action="store_true")
    p.add_argument("--range", nargs=3, action="append", metavar=("NAME", "LO", "HI"))
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="CSV path; threshold grid goes to *.thresholds.csv")
    p.add_argument("--config", metavar="JSON")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("sweep", help="dense curve for a figure or a custom parameter scan")
    p.add_argument("name", nargs="?", choices=SWEEPS)
    p.add_argument("--figure", choices=SWEEPS)
    _add_state_args(p)
    p.add_argument("--vary")
    p.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--points", type=int)
    p.add_argument("--lambda", dest="lam", type=float, nargs="+")
    p.add_argument("--average", action="store_true")
    p.add_argument("--out")
    p.add_argument("--config", metavar="JSON")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QuadratureFailure as exc:
        print(f"error: quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
