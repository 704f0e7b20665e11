"""Command-line interface.

Exit codes: 2 unreadable/unparsable input, 3 dimension mismatch between the
two measures, 4 unwritable output location, 5 unknown experiment name.
Given the same inputs, options, and seed the outputs are byte-identical
across runs and across EST_THREADS settings.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import click
import numpy as np

from . import io
from .applications import (
    gaussian_pair,
    interpolate,
    least_squares_accuracy,
    lot_embed,
    reference_measure,
    two_class_task,
    weak_convergence_table,
)
from .errors import TransportError
from .est import est_plan_tempered, min_swgg
from .measures import DiscreteMeasure, make_measure, plan_cost
from .oracles import sinkhorn, wasserstein_exact
from .slicing import sample_sphere

EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_UNWRITABLE = 4
EXIT_UNKNOWN_EXPERIMENT = 5

KNOWN_EXPERIMENTS = ("weak-convergence", "temperature-sweep", "embed-bench")


@dataclass(frozen=True)
class RunConfig:
    """Options shared by every command."""

    p: float = 2.0
    slices: int = 128
    tau: float = 0.0
    seed: int = 0
    grouping_tol: float = 1e-9
    fmt: str = "csv"

    def __post_init__(self) -> None:
        if self.p <= 1:
            raise click.BadParameter("p must exceed 1", param_hint="--p")
        if self.slices < 1:
            raise click.BadParameter("need at least one slice", param_hint="--slices")
        if self.tau < 0:
            raise click.BadParameter("tau must be nonnegative", param_hint="--tau")
        if self.grouping_tol < 0:
            raise click.BadParameter(
                "grouping tolerance must be nonnegative", param_hint="--grouping-tol"
            )


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_measure(path: str) -> DiscreteMeasure:
    try:
        return io.read_measure(path)
    except (OSError, TransportError) as exc:
        _fail(EXIT_PARSE, f"cannot read measure {path}: {exc}")


def _load_pair(source: str, target: str) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    mu = _load_measure(source)
    nu = _load_measure(target)
    if mu.dim != nu.dim:
        _fail(
            EXIT_DIMENSION,
            f"dimension mismatch: {source} has d={mu.dim}, {target} has d={nu.dim}",
        )
    return mu, nu


def _ensure_out_dir(out_dir: str) -> Path:
    path = Path(out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        _fail(EXIT_UNWRITABLE, f"cannot write to {out_dir}: {exc}")
    return path


def _write_meta(path: Path, payload: dict) -> None:
    try:
        path.write_text(json.dumps(payload, sort_keys=True, indent=2))
    except OSError as exc:
        _fail(EXIT_UNWRITABLE, f"cannot write {path}: {exc}")


def _compute_plan(mu, nu, method: str, cfg: RunConfig, lam: float):
    """Plan plus per-slice details (None for the unsliced methods)."""
    if method == "est":
        directions = sample_sphere(cfg.slices, mu.dim, cfg.seed)
        res = est_plan_tempered(
            mu, nu, directions, p=cfg.p, tau=cfg.tau, grouping_tol=cfg.grouping_tol
        )
        return res.plan, res.distance, res.per_slice_costs, res.slice_weights, None
    if method == "min-swgg":
        directions = sample_sphere(cfg.slices, mu.dim, cfg.seed)
        idx, plan, cost = min_swgg(mu, nu, directions, p=cfg.p, grouping_tol=cfg.grouping_tol)
        return plan, cost, None, None, None
    if method == "exact":
        plan, dist = wasserstein_exact(mu, nu, cfg.p)
        return plan, dist, None, None, None
    if method == "sinkhorn":
        plan, err = sinkhorn(mu, nu, p=cfg.p, lam=lam)
        return plan, plan_cost(plan, mu, nu, cfg.p), None, None, err
    raise AssertionError(method)


config_options = [
    click.option("--p", "p", type=float, default=2.0, show_default=True, help="Cost exponent (> 1)."),
    click.option("--slices", type=int, default=128, show_default=True, help="Number of directions L."),
    click.option("--tau", type=float, default=0.0, show_default=True, help="Direction-weight temperature."),
    click.option("--seed", type=int, default=0, show_default=True, help="RNG seed for directions."),
    click.option(
        "--grouping-tol",
        type=float,
        default=1e-9,
        show_default=True,
        help="Relative tolerance for merging coincident projections.",
    ),
    click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "json"]),
        default="csv",
        show_default=True,
        help="Output format.",
    ),
]


def _with_config(fn):
    for opt in reversed(config_options):
        fn = opt(fn)
    return fn


def _cfg(p, slices, tau, seed, grouping_tol, fmt) -> RunConfig:
    return RunConfig(p=p, slices=slices, tau=tau, seed=seed, grouping_tol=grouping_tol, fmt=fmt)


@click.group()
def main() -> None:
    """Sliced transport plans and distances for discrete measures."""


@main.command()
@click.argument("source", type=click.Path())
@click.argument("target", type=click.Path())
@_with_config
@click.option(
    "--method",
    type=click.Choice(["est", "min-swgg", "exact", "sinkhorn"]),
    default="est",
    show_default=True,
)
@click.option("--lambda", "lam", type=float, default=1.0, show_default=True, help="Entropic regularizer.")
@click.option("--per-slice", is_flag=True, help="Also print slice index, cost, weight rows.")
def distance(source, target, p, slices, tau, seed, grouping_tol, fmt, method, lam, per_slice):
    """Print the distance between two measure files (12 significant digits)."""
    cfg = _cfg(p, slices, tau, seed, grouping_tol, fmt)
    mu, nu = _load_pair(source, target)
    _plan, dist, costs, weights, _err = _compute_plan(mu, nu, method, cfg, lam)
    if fmt == "json":
        payload: dict = {"distance": float(dist), "method": method, "seed": cfg.seed}
        if per_slice and costs is not None:
            payload["per_slice"] = [
                {"slice": k, "cost": float(c), "weight": float(w)}
                for k, (c, w) in enumerate(zip(costs, weights))
            ]
        click.echo(json.dumps(payload))
        return
    click.echo(f"{dist:.12g}")
    if per_slice and costs is not None:
        for k, (c, w) in enumerate(zip(costs, weights)):
            click.echo(f"{k},{c:.17g},{w:.17g}")


@main.command()
@click.argument("source", type=click.Path())
@click.argument("target", type=click.Path())
@click.argument("out_file", type=click.Path())
@_with_config
@click.option(
    "--method",
    type=click.Choice(["est", "min-swgg", "exact", "sinkhorn"]),
    default="est",
    show_default=True,
)
@click.option("--lambda", "lam", type=float, default=1.0, show_default=True, help="Entropic regularizer.")
def plan(source, target, out_file, p, slices, tau, seed, grouping_tol, fmt, method, lam):
    """Compute a transport plan and write it as CSV (i,j,mass)."""
    cfg = _cfg(p, slices, tau, seed, grouping_tol, fmt)
    mu, nu = _load_pair(source, target)
    result_plan, dist, _costs, _weights, err = _compute_plan(mu, nu, method, cfg, lam)
    out_path = Path(out_file)
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        io.write_plan_csv(result_plan, out_path)
    except OSError as exc:
        _fail(EXIT_UNWRITABLE, f"cannot write {out_file}: {exc}")
    meta = {
        "command": "plan",
        "source": str(source),
        "target": str(target),
        "method": method,
        "distance": float(dist),
        "seed": cfg.seed,
        **asdict(cfg),
    }
    if method == "sinkhorn":
        meta["lambda"] = lam
        meta["marginal_error"] = float(err)
        click.echo(f"marginal_error {err:.17g}")
    _write_meta(out_path.with_suffix(out_path.suffix + ".meta.json"), meta)


@main.command("interpolate")
@click.argument("source", type=click.Path())
@click.argument("target", type=click.Path())
@click.argument("out_dir", type=click.Path())
@_with_config
@click.option(
    "--method",
    type=click.Choice(["est", "min-swgg", "exact", "sinkhorn"]),
    default="est",
    show_default=True,
)
@click.option("--lambda", "lam", type=float, default=1.0, show_default=True, help="Entropic regularizer.")
@click.option("--steps", type=click.IntRange(min=1), default=10, show_default=True)
def interpolate_cmd(source, target, out_dir, p, slices, tau, seed, grouping_tol, fmt, method, lam, steps):
    """Write steps+1 interpolated measures t_000 ... t_<steps>."""
    cfg = _cfg(p, slices, tau, seed, grouping_tol, fmt)
    mu, nu = _load_pair(source, target)
    out_path = _ensure_out_dir(out_dir)
    result_plan, _dist, _costs, _weights, _err = _compute_plan(mu, nu, method, cfg, lam)
    ext = "json" if fmt == "json" else "csv"
    try:
        for k in range(steps + 1):
            t = k / steps
            frame = interpolate(result_plan, mu, nu, t)
            io.write_measure(frame, out_path / f"t_{k:03d}.{ext}", fmt=fmt)
    except OSError as exc:
        _fail(EXIT_UNWRITABLE, f"cannot write into {out_dir}: {exc}")
    _write_meta(
        out_path / "meta.json",
        {
            "command": "interpolate",
            "source": str(source),
            "target": str(target),
            "method": method,
            "steps": steps,
            "seed": cfg.seed,
            **asdict(cfg),
        },
    )


def _write_csv_rows(path: Path, header: list[str], rows: list[list]) -> None:
    import csv as _csv

    try:
        with path.open("w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        _fail(EXIT_UNWRITABLE, f"cannot write {path}: {exc}")


def _experiment_weak_convergence(out_path: Path, cfg: RunConfig, taus, lambdas) -> None:
    mu, nu = gaussian_pair(size=50, dim=2, shift=3.0, seed=cfg.seed)
    ts = [round(0.1 * k, 1) for k in range(10)] + [0.99, 1.0]
    rows = weak_convergence_table(
        mu,
        nu,
        ts,
        slices=cfg.slices,
        taus=taus,
        lambdas=lambdas,
        seed=cfg.seed,
        p=cfg.p,
        grouping_tol=cfg.grouping_tol,
    )
    header = list(rows[0].keys())
    _write_csv_rows(
        out_path / "weak_convergence.csv",
        header,
        [[format(row[k], ".17g") for k in header] for row in rows],
    )


def _experiment_temperature_sweep(out_path: Path, cfg: RunConfig, taus) -> None:
    rng = np.random.default_rng(cfg.seed)
    n = 30
    mu = make_measure(rng.standard_normal((n, 2)), np.full(n, 1.0 / n))
    nu = make_measure(rng.standard_normal((2 * n, 2)) + [2.0, 0.0], np.full(2 * n, 0.5 / n))
    directions = sample_sphere(cfg.slices, 2, cfg.seed)
    rows = []
    for tau in taus:
        res = est_plan_tempered(
            mu, nu, directions, p=cfg.p, tau=tau, grouping_tol=cfg.grouping_tol
        )
        rows.append([format(tau, ".17g"), format(res.distance, ".17g"), len(res.plan)])
    _write_csv_rows(out_path / "temperature_sweep.csv", ["tau", "distance", "entries"], rows)


def _experiment_embed_bench(out_path: Path, cfg: RunConfig, lam: float) -> None:
    clouds, labels = two_class_task(seed=cfg.seed)
    ref = reference_measure(size=50, dim=2, seed=cfg.seed)
    methods = [
        ("est_tau0", {"method": "est", "tau": 0.0, "slices": cfg.slices, "seed": cfg.seed}),
        ("est_tau1e6", {"method": "est", "tau": 1e6, "slices": cfg.slices, "seed": cfg.seed}),
        ("exact", {"method": "exact"}),
        (f"sinkhorn_lam{lam:g}", {"method": "sinkhorn", "lam": lam}),
    ]
    rows = []
    for name, kwargs in methods:
        feats = np.stack(
            [lot_embed(ref, cloud, p=cfg.p, **kwargs).rows.ravel() for cloud in clouds]
        )
        rows.append([name, format(least_squares_accuracy(feats, labels), ".17g")])
    _write_csv_rows(out_path / "embed_bench.csv", ["method", "accuracy"], rows)


@main.command()
@click.argument("name")
@click.argument("out_dir", type=click.Path())
@_with_config
@click.option("--taus", default="0,1,10", show_default=True, help="Comma-separated tau list.")
@click.option("--lambdas", default="1,10", show_default=True, help="Comma-separated lambda list.")
@click.option("--lambda", "lam", type=float, default=10.0, show_default=True, help="Embedding regularizer.")
def experiment(name, out_dir, p, slices, tau, seed, grouping_tol, fmt, taus, lambdas, lam):
    """Run a named experiment and write plot-ready CSV tables."""
    if name not in KNOWN_EXPERIMENTS:
        _fail(
            EXIT_UNKNOWN_EXPERIMENT,
            f"unknown experiment {name!r}; known: {', '.join(KNOWN_EXPERIMENTS)}",
        )
    cfg = _cfg(p, slices, tau, seed, grouping_tol, fmt)
    out_path = _ensure_out_dir(out_dir)
    try:
        tau_list = [float(v) for v in taus.split(",") if v.strip()]
        lambda_list = [float(v) for v in lambdas.split(",") if v.strip()]
    except ValueError as exc:
        _fail(EXIT_PARSE, f"bad numeric list: {exc}")
    if name == "weak-convergence":
        _experiment_weak_convergence(out_path, cfg, tau_list, lambda_list)
    elif name == "temperature-sweep":
        _experiment_temperature_sweep(out_path, cfg, tau_list)
    else:
        _experiment_embed_bench(out_path, cfg, lam)
    _write_meta(
        out_path / "meta.json",
        {
            "command": "experiment",
            "experiment": name,
            "taus": taus,
            "lambdas": lambdas,
            "lambda": lam,
            "seed": seed,
            **asdict(cfg),
        },
    )


if __name__ == "__main__":
    main()
