"""Command line entry point: simulate, density, moments, convergence, figure1."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .diagnostics import convergence_report, density_overlay, ks_distance
from .initial_state import DEFAULT_GRID_SIZE, DEFAULT_TAIL_TOL, InitCoin, WeightSpec, synthesize_initial
from .io import ConfigError, ExperimentConfig, write_csv, write_json
from .limit_laws import (
    SEED_TO_DENSITY,
    SpectralContext,
    cdf_grid,
    closed_form_density,
    density_for_weight,
    theorem1_density,
)
from .moments import empirical_moment, kspace_moments, xspace_moment
from .walk import distribution, evolve

DENSITY_POINTS = 2001
FIGURE_SEEDS = ("semicircle", "arcsine", "gaussian", "uniform")


def _coin_record(coin: InitCoin) -> dict:
    return {
        "alpha": [coin.alpha.real, coin.alpha.imag],
        "beta": [coin.beta.real, coin.beta.imag],
    }


def _output_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(cfg: ExperimentConfig) -> dict:
    out = _output_dir(cfg.output_dir)
    w = cfg.weight_spec()
    coin = cfg.coin()
    started = time.perf_counter()
    state, report = synthesize_initial(w, coin, cfg.grid_size, cfg.tail_tol)
    written = []
    for t in cfg.t_list:
        state = evolve(state, cfg.theta, t - state.time)
        dist = distribution(state)
        write_csv(out / f"dist_t{t}.csv", ["x", "prob"], zip(dist.positions.tolist(), dist.probs))
        write_json(
            out / f"dist_t{t}.json",
            {
                "config": cfg.to_dict(),
                "t": t,
                "theta": cfg.theta,
                "coin": _coin_record(coin),
                "weight": w.describe(),
                "W_numeric": report.weight_norm,
                "X0": report.cutoff,
                "deficit": report.deficit,
                "total_mass": dist.total(),
                "wall_time": time.perf_counter() - started,
            },
        )
        written.append(f"dist_t{t}.csv")
    return {"written": written}


def cmd_density(cfg: ExperimentConfig) -> dict:
    out = _output_dir(cfg.output_dir)
    ctx = SpectralContext(cfg.theta)
    coin = cfg.coin()
    w = cfg.weight_spec()
    cc = ctx.edge
    x = np.linspace(-0.999 * cc, 0.999 * cc, DENSITY_POINTS)
    general = theorem1_density(w, ctx, coin).pdf(x)
    header = ["x", "limit_density", "theorem1_density"]
    columns = [x, general, general]
    meta = {"config": cfg.to_dict(), "coin": _coin_record(coin), "lambda": None}
    if w.kind in SEED_TO_DENSITY:
        closed = closed_form_density(SEED_TO_DENSITY[w.kind], ctx, coin, cfg.resolved_sigma).pdf(x)
        header.append("closed_form_density")
        columns = [x, closed, general, closed]
        meta["max_abs_diff"] = float(np.max(np.abs(closed - general)))
        meta["density_kind"] = SEED_TO_DENSITY[w.kind]
    else:
        meta["density_kind"] = "general"
    limit = density_for_weight(w, ctx, coin)
    meta["lambda"] = limit.lam
    meta["trapezoid_mass"] = float(np.trapezoid(columns[1], x))
    # exact mass of the emitted window; the curve stops short of the edges
    window = cdf_grid(limit, x[[0, -1]])
    meta["window_mass"] = float(window[1] - window[0])
    write_csv(out / "density.csv", header, zip(*columns))
    write_json(out / "density.json", meta)
    return {"written": ["density.csv"], "max_abs_diff": meta.get("max_abs_diff")}


def cmd_moments(cfg: ExperimentConfig) -> dict:
    out = _output_dir(cfg.output_dir)
    ctx = SpectralContext(cfg.theta)
    coin = cfg.coin()
    w = cfg.weight_spec()
    density = density_for_weight(w, ctx, coin)
    orders = cfg.r_list
    xs = [xspace_moment(density, r) for r in orders]
    ks = kspace_moments(w, ctx, coin, orders)
    state, report = synthesize_initial(w, coin, cfg.grid_size, cfg.tail_tol)
    rows = []
    for t in cfg.t_list:
        if t < 1:
            raise ConfigError("moments need t >= 1")
        state = evolve(state, cfg.theta, t - state.time)
        dist = distribution(state)
        for r, xm, km in zip(orders, xs, ks):
            sim = empirical_moment(dist, r)
            rows.append((r, sim, xm, float(km), t, abs(sim - xm), abs(sim - km), abs(km - xm)))
    write_csv(
        out / "moments.csv",
        ["r", "simulated", "xspace", "kspace", "t", "diff_sim_x", "diff_sim_k", "diff_k_x"],
        rows,
    )
    write_json(
        out / "moments.json",
        {
            "config": cfg.to_dict(),
            "coin": _coin_record(coin),
            "density": density.describe(),
            "X0": report.cutoff,
            "deficit": report.deficit,
            "max_diff_k_x": max(row[-1] for row in rows),
        },
    )
    return {"written": ["moments.csv"]}


def cmd_convergence(cfg: ExperimentConfig) -> dict:
    out = _output_dir(cfg.output_dir)
    ctx = SpectralContext(cfg.theta)
    coin = cfg.coin()
    w = cfg.weight_spec()
    density = density_for_weight(w, ctx, coin)
    orders = [r for r in cfg.r_list if r > 0] or [1, 2, 3, 4]
    report = convergence_report(w, coin, density, cfg.t_list, orders, cfg.grid_size, cfg.tail_tol)
    header = ["t", "ks", *[f"err_r{r}" for r in orders]]
    rows = [(t, k, *errs) for t, k, errs in zip(report.t_values, report.ks, report.moment_errors)]
    write_csv(out / "convergence.csv", header, rows)
    write_json(out / "convergence.json", {"config": cfg.to_dict(), **report.to_dict()})
    return {"written": ["convergence.csv"]}


GNUPLOT_TEMPLATE = """\
# limit density (red) against the simulated distribution (blue), t = {t}, theta = {theta:.17g}
set terminal pngcairo size 1600,400
set output 'figure1.png'
set datafile separator ','
set key off
set multiplot layout 1,4
{panels}unset multiplot
"""

GNUPLOT_PANEL = """\
set title '{name}'
plot 'overlay_{name}.csv' using 1:2 every ::1 with lines lc rgb 'blue', \\
     'overlay_{name}.csv' using 1:3 every ::1 with lines lc rgb 'red'
"""


def cmd_figure1(
    theta: float = math.pi / 4,
    t: int = 5000,
    grid_size: int = DEFAULT_GRID_SIZE,
    sigma: float | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
    output_dir: str = "figure1",
) -> dict:
    """Overlays of the four seed laws against the walk at time t for the caption coin."""
    out = _output_dir(output_dir)
    ctx = SpectralContext(theta)
    coin = InitCoin.symmetric()
    sigma = 0.25 * ctx.edge if sigma is None else sigma
    ks = {}
    cutoffs = {}
    for name in FIGURE_SEEDS:
        w = WeightSpec.gaussian(theta, sigma) if name == "gaussian" else WeightSpec(name, theta)
        density = density_for_weight(w, ctx, coin)
        state, report = synthesize_initial(w, coin, grid_size, tail_tol)
        dist = distribution(evolve(state, theta, t))
        ks[name] = ks_distance(dist, density)
        cutoffs[name] = report.cutoff
        ov = density_overlay(dist, density, 2 / t, x_range=(-1.0, 1.0))
        write_csv(out / f"overlay_{name}.csv", ["x", "simulated", "limit"], zip(ov.x, ov.simulated, ov.limit))
    panels = "".join(GNUPLOT_PANEL.format(name=n) for n in FIGURE_SEEDS)
    (out / "figure1.gp").write_bytes(GNUPLOT_TEMPLATE.format(t=t, theta=theta, panels=panels).encode())
    write_json(
        out / "figure1.json",
        {
            "theta": theta,
            "t": t,
            "sigma": sigma,
            "grid_size": grid_size,
            "tail_tol": tail_tol,
            "coin": _coin_record(coin),
            "ks": ks,
            "X0": cutoffs,
        },
    )
    return {"written": [f"overlay_{n}.csv" for n in FIGURE_SEEDS] + ["figure1.gp"], "ks": ks}


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--theta", type=float)
    p.add_argument("--alpha-re", type=float)
    p.add_argument("--alpha-im", type=float)
    p.add_argument("--beta-re", type=float)
    p.add_argument("--beta-im", type=float)
    p.add_argument("--weight", choices=["unit", "semicircle", "arcsine", "gaussian", "uniform", "tabulated"])
    p.add_argument("--sigma", type=float)
    p.add_argument("--weight-csv", help="two-column (k, w) CSV for --weight tabulated")
    p.add_argument("--t", type=int, nargs="+", dest="t_list", help="step counts, ascending")
    p.add_argument("--r-max", type=int)
    p.add_argument("--grid-size", type=int)
    p.add_argument("--tail-tol", type=float)
    p.add_argument("--out", dest="output_dir")


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    defaults = ExperimentConfig()
    alpha = list(data.get("alpha", defaults.alpha))
    beta = list(data.get("beta", defaults.beta))
    for flag, target, i in (
        ("alpha_re", alpha, 0),
        ("alpha_im", alpha, 1),
        ("beta_re", beta, 0),
        ("beta_im", beta, 1),
    ):
        if getattr(args, flag) is not None:
            target[i] = getattr(args, flag)
    data["alpha"], data["beta"] = alpha, beta
    for key in ("theta", "weight", "sigma", "weight_csv", "t_list", "grid_size", "tail_tol", "output_dir"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    if args.r_max is not None:
        data.pop("r_list", None)
        data["r_max"] = args.r_max
    return ExperimentConfig.from_dict(data)


class _Parser(argparse.ArgumentParser):
    """Usage errors become ConfigError so they reach stderr as JSON."""

    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwlaws", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("simulate", "write P(X_t = x) for each t"),
        ("density", "write the limit density curve"),
        ("moments", "compare simulated, x-space and k-space moments"),
        ("convergence", "KS distance and moment errors along t"),
    ):
        _add_experiment_flags(sub.add_parser(name, help=help_))
    fig = sub.add_parser("figure1", help="four seed overlays at t = 5000 and a gnuplot script")
    fig.add_argument("--theta", type=float, default=math.pi / 4)
    fig.add_argument("--t", type=int, default=5000)
    fig.add_argument("--grid-size", type=int, default=DEFAULT_GRID_SIZE)
    fig.add_argument("--sigma", type=float, default=None)
    fig.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)
    fig.add_argument("--out", default="figure1")
    return parser


COMMANDS = {
    "simulate": cmd_simulate,
    "density": cmd_density,
    "moments": cmd_moments,
    "convergence": cmd_convergence,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "figure1":
            result = cmd_figure1(args.theta, args.t, args.grid_size, args.sigma, args.tail_tol, args.out)
        else:
            result = COMMANDS[args.command](_resolve_config(args))
    except ConfigError as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc)}), file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        for attr in ("achievable_deficit", "error_estimate"):
            if getattr(exc, attr, None) is not None:
                payload[attr] = getattr(exc, attr)
        print(json.dumps(payload), file=sys.stderr)
        return 1
    print(json.dumps(result, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
