"""Command-line front end.

Subcommands::

    step     open-loop step response (optionally a Bode table)
    gains    FOPID gains from explicit LQR weights for one delay method
    design   trade-off search, front CSVs per method, verdict, median pick
    rule     evaluate the polynomial tuning rules at one operating point
    sweep    robustness surfaces of a fixed controller over (L, T)

All outputs are UTF-8 comma-delimited CSV files with a header row.  Exit
codes: 0 success, 2 invalid input, 3 numerical failure.  The default
output directory comes from ``LQRFOPID_OUTDIR`` (falling back to the
current directory); ``--config FILE`` reads ``key=value`` lines that are
overridden by explicit flags.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .design import (
    DelayMethod,
    FopidController,
    LqrDesignVars,
    NioptdPlant,
    design_from_vars,
)
from .matops import CareFailure
from .nsga2 import (
    MooConfig,
    compare_fronts,
    median_solution,
    run_nsga2,
    write_front_csv,
)
from .rules import eval_tuning_rule
from .sim import (
    Scenario,
    frequency_response,
    robustness_sweep,
    simulate_open_loop_step,
    write_sweep_csv,
    write_trajectory_csv,
)

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_NUMERICAL_FAILURE = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID_INPUT):
        super().__init__(message)
        self.code = code


def _read_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _install_config_defaults(args: argparse.Namespace) -> None:
    """Install config-file values as the subcommand's argparse defaults.

    A subsequent re-parse of the same argv lets explicit flags override
    the file, which is the documented precedence.
    """
    sub: argparse.ArgumentParser = args.subparser
    converted: dict[str, object] = {}
    for key, raw in _read_config(args.config).items():
        if not hasattr(args, key) or key in ("config", "subparser", "func", "command"):
            raise CliError(f"unknown config key {key!r}")
        template = sub.get_default(key)
        try:
            if isinstance(template, bool):
                converted[key] = raw.lower() in ("1", "true", "yes", "on")
            elif isinstance(template, int) and not isinstance(template, bool):
                converted[key] = int(raw)
            elif isinstance(template, float):
                converted[key] = float(raw)
            else:
                converted[key] = raw
        except ValueError as exc:
            raise CliError(f"config key {key!r}: {exc}")
    sub.set_defaults(**converted)


def _plant_from_args(args) -> NioptdPlant:
    try:
        return NioptdPlant(K=args.K, L=args.L, T=args.T, alpha=args.alpha)
    except ValueError as exc:
        raise CliError(f"invalid plant: {exc}")


def _out_dir(args) -> Path:
    out = Path(args.out_dir or os.environ.get("LQRFOPID_OUTDIR", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _add_plant_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--K", type=float, default=1.0, help="process dc gain")
    p.add_argument("--L", type=float, default=0.5, help="process delay [s]")
    p.add_argument("--T", type=float, default=2.0, help="pseudo time constant")
    p.add_argument("--alpha", type=float, default=1.5, help="fractional order in (0, 2)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out-dir", default=None, help="output directory (default: $LQRFOPID_OUTDIR or .)")
    p.add_argument("--config", default=None, help="key=value config file; flags override")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--plot", action="store_true", help="also write PNG plots (needs matplotlib)")


def _maybe_plot(args, fig_path: Path, xs, ys, labels, title) -> None:
    if not args.plot:
        return
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping plot", file=sys.stderr)
        return
    fig, ax = plt.subplots()
    for x, y, lab in zip(xs, ys, labels):
        ax.plot(x, y, label=lab)
    ax.set_title(title)
    ax.grid(True)
    if labels and any(labels):
        ax.legend()
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)


def _cmd_step(args, parser) -> int:
    plant = _plant_from_args(args)
    if args.h <= 0:
        raise CliError(f"step size must be positive, got {args.h}")
    out = _out_dir(args)
    result = simulate_open_loop_step(plant, horizon=args.horizon, h=args.h,
                                     solver=args.solver)
    if result.diverged:
        raise CliError("open-loop simulation diverged", EXIT_NUMERICAL_FAILURE)
    traj = out / "step.csv"
    write_trajectory_csv(traj, result)
    print(f"wrote {traj}")
    if args.bode:
        w = np.logspace(np.log10(args.w_low), np.log10(args.w_high), args.n_freq)
        H = frequency_response(plant, w)
        bode = out / "bode.csv"
        with open(bode, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("omega,magnitude_db,phase_deg\n")
            for wi, hi in zip(w, H):
                fh.write(f"{wi:.10g},{20 * np.log10(abs(hi)):.10g},"
                         f"{np.degrees(np.angle(hi)):.10g}\n")
        print(f"wrote {bode}")
    _maybe_plot(args, out / "step.png", [result.t], [result.y], [""],
                f"open-loop step (alpha={plant.alpha})")
    return EXIT_OK


def _cmd_gains(args, parser) -> int:
    plant = _plant_from_args(args)
    try:
        vars = LqrDesignVars(q1=args.Q1, q2=args.Q2, q3=args.Q3, r=args.R,
                             lam=args.lam, mu=args.mu)
    except ValueError as exc:
        raise CliError(f"invalid design variables: {exc}")
    try:
        method = DelayMethod(args.method)
    except ValueError:
        raise CliError(f"unknown method {args.method!r}; use delay_free, cai or he")
    try:
        controller = design_from_vars(plant, vars, method)
    except CareFailure as exc:
        raise CliError(f"Riccati design failed: {exc}", EXIT_NUMERICAL_FAILURE)
    out = _out_dir(args)
    path = out / "gains.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("Kp,Ki,Kd,lambda,mu,method\n")
        fh.write(f"{controller.kp:.10g},{controller.ki:.10g},{controller.kd:.10g},"
                 f"{controller.lam:.10g},{controller.mu:.10g},{method.value}\n")
    print(f"Kp={controller.kp:.6g} Ki={controller.ki:.6g} Kd={controller.kd:.6g} "
          f"lambda={controller.lam:.6g} mu={controller.mu:.6g}")
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_design(args, parser) -> int:
    plant = _plant_from_args(args)
    methods = []
    for name in args.methods.split(","):
        name = name.strip()
        try:
            methods.append(DelayMethod(name))
        except ValueError:
            raise CliError(f"unknown method {name!r}; use delay_free, cai or he")
    scenario = Scenario(horizon=args.horizon, step_size=args.h)
    config = MooConfig(population=args.pop, generations=args.gens, seed=args.seed)
    out = _out_dir(args)
    fronts = {}
    for method in methods:
        best = None
        for restart in range(args.restarts):
            cfg = MooConfig(population=args.pop, generations=args.gens,
                            seed=args.seed + restart)
            front = run_nsga2(plant, method, cfg, scenario, workers=args.workers)
            if best is None or _front_coverage(front) > _front_coverage(best):
                best = front
        if best is None or len(best) == 0:
            raise CliError(f"no feasible designs found for {method.value}",
                           EXIT_NUMERICAL_FAILURE)
        fronts[method] = best
        path = out / f"front_{method.value}.csv"
        write_front_csv(path, best)
        print(f"{method.value}: {len(best)} non-dominated designs -> {path}")
    if DelayMethod.CAI in fronts and DelayMethod.HE in fronts:
        verdict = compare_fronts(fronts[DelayMethod.CAI], fronts[DelayMethod.HE])
        print(f"front comparison verdict: {verdict}")
    for method, front in fronts.items():
        entry = median_solution(front)
        c = entry.controller
        print(f"median [{method.value}]: ITSE={entry.objectives[0]:.6g} "
              f"ISDCO={entry.objectives[1]:.6g} Kp={c.kp:.6g} Ki={c.ki:.6g} "
              f"Kd={c.kd:.6g} lambda={c.lam:.6g} mu={c.mu:.6g}")
    if args.plot:
        xs, ys, labels = [], [], []
        for method, front in fronts.items():
            obj = front.objectives_array()
            xs.append(obj[:, 0])
            ys.append(obj[:, 1])
            labels.append(method.value)
        _maybe_plot(args, out / "fronts.png", xs, ys, labels, "trade-off fronts")
    return EXIT_OK


def _front_coverage(front) -> float:
    """Scalar coverage proxy: larger fronts with lower objectives win."""
    if len(front) == 0:
        return -np.inf
    obj = front.objectives_array()
    return -float(obj[:, 0].min() + obj[:, 1].min()) + 1e-3 * len(front)


def _cmd_rule(args, parser) -> int:
    if args.K == 0:
        raise CliError("process gain K must be nonzero")
    controller = eval_tuning_rule(args.LT, args.alpha, args.K)
    out = _out_dir(args)
    path = out / "rule.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("Kp,Ki,Kd,lambda,mu,L_over_T,alpha,K\n")
        fh.write(f"{controller.kp:.10g},{controller.ki:.10g},{controller.kd:.10g},"
                 f"{controller.lam:.10g},{controller.mu:.10g},"
                 f"{args.LT:.10g},{args.alpha:.10g},{args.K:.10g}\n")
    print(f"Kp={controller.kp:.6g} Ki={controller.ki:.6g} Kd={controller.kd:.6g} "
          f"lambda={controller.lam:.6g} mu={controller.mu:.6g}")
    print(f"wrote {path}")
    return EXIT_OK


def _parse_grid(text: str, name: str) -> np.ndarray:
    try:
        values = np.array([float(v) for v in text.split(",") if v.strip() != ""])
    except ValueError as exc:
        raise CliError(f"invalid {name} grid {text!r}: {exc}")
    if values.size == 0:
        raise CliError(f"empty {name} grid")
    return values


def _cmd_sweep(args, parser) -> int:
    plant = _plant_from_args(args)
    try:
        controller = FopidController(kp=args.Kp, ki=args.Ki, kd=args.Kd,
                                     lam=args.lam, mu=args.mu)
    except ValueError as exc:
        raise CliError(f"invalid controller: {exc}")
    L_grid = _parse_grid(args.L_grid, "L") if args.L_grid else np.array([plant.L])
    T_grid = _parse_grid(args.T_grid, "T") if args.T_grid else np.array([plant.T])
    if np.any(L_grid < 0) or np.any(T_grid <= 0):
        raise CliError("grids must satisfy L >= 0 and T > 0")
    scenario = Scenario(horizon=args.horizon, step_size=args.h)
    sweep = robustness_sweep(plant, controller, L_grid, T_grid, scenario)
    out = _out_dir(args)
    path = out / "sweep.csv"
    write_sweep_csv(path, sweep)
    print(f"wrote {path}")
    if sweep.diverged.any():
        print(f"{int(sweep.diverged.sum())} cell(s) diverged (penalty indices)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lqrfopid",
        description="LQR-weighted multi-objective FOPID tuning for delayed "
                    "fractional-order processes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_step = sub.add_parser("step", help="open-loop step response")
    _add_plant_args(p_step)
    _add_common(p_step)
    p_step.add_argument("--horizon", type=float, default=100.0)
    p_step.add_argument("--h", type=float, default=0.01, help="step size [s]")
    p_step.add_argument("--solver", choices=("gl", "oustaloup"), default="gl")
    p_step.add_argument("--bode", action="store_true", help="also write a Bode table")
    p_step.add_argument("--w-low", type=float, default=1e-3)
    p_step.add_argument("--w-high", type=float, default=1e3)
    p_step.add_argument("--n-freq", type=int, default=200)
    p_step.set_defaults(func=_cmd_step, subparser=p_step)

    p_gains = sub.add_parser("gains", help="FOPID gains from LQR weights")
    _add_plant_args(p_gains)
    _add_common(p_gains)
    p_gains.add_argument("--method", default="he",
                         help="delay_free, cai or he (default he)")
    p_gains.add_argument("--Q1", type=float, required=True)
    p_gains.add_argument("--Q2", type=float, required=True)
    p_gains.add_argument("--Q3", type=float, required=True)
    p_gains.add_argument("--R", type=float, required=True)
    p_gains.add_argument("--lam", type=float, default=1.0, help="integral order")
    p_gains.add_argument("--mu", type=float, default=0.5, help="derivative order")
    p_gains.set_defaults(func=_cmd_gains, subparser=p_gains)

    p_design = sub.add_parser("design", help="multi-objective weight selection")
    _add_plant_args(p_design)
    _add_common(p_design)
    p_design.add_argument("--methods", default="cai,he",
                          help="comma list of delay methods (default cai,he)")
    p_design.add_argument("--pop", type=int, default=100, help="population size")
    p_design.add_argument("--gens", type=int, default=100, help="generations")
    p_design.add_argument("--restarts", type=int, default=1,
                          help="independent runs; the best-covering front is kept")
    p_design.add_argument("--workers", type=int, default=1,
                          help="parallel objective evaluations")
    p_design.add_argument("--horizon", type=float, default=100.0)
    p_design.add_argument("--h", type=float, default=0.01)
    p_design.set_defaults(func=_cmd_design, subparser=p_design)

    p_rule = sub.add_parser("rule", help="evaluate the polynomial tuning rules")
    _add_common(p_rule)
    p_rule.add_argument("--LT", type=float, required=True, help="delay-to-lag ratio L/T")
    p_rule.add_argument("--alpha", type=float, required=True)
    p_rule.add_argument("--K", type=float, default=1.0)
    p_rule.set_defaults(func=_cmd_rule, subparser=p_rule)

    p_sweep = sub.add_parser("sweep", help="robustness sweep of a fixed controller")
    _add_plant_args(p_sweep)
    _add_common(p_sweep)
    p_sweep.add_argument("--Kp", type=float, required=True)
    p_sweep.add_argument("--Ki", type=float, required=True)
    p_sweep.add_argument("--Kd", type=float, required=True)
    p_sweep.add_argument("--lam", type=float, required=True)
    p_sweep.add_argument("--mu", type=float, required=True)
    p_sweep.add_argument("--L-grid", default=None, help="comma list of delays")
    p_sweep.add_argument("--T-grid", default=None, help="comma list of lags")
    p_sweep.add_argument("--horizon", type=float, default=100.0)
    p_sweep.add_argument("--h", type=float, default=0.01)
    p_sweep.set_defaults(func=_cmd_sweep, subparser=p_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            _install_config_defaults(args)
            args = parser.parse_args(argv)
        return args.func(args, parser)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except CareFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE


if __name__ == "__main__":
    sys.exit(main())
