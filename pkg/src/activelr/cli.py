"""Command-line entry point for training runs, checkers, sweeps, and serving.

Exit codes: 0 success, 1 usage or scope error, 2 computational failure
(a diverged run or a failed checker suite).  Every subcommand accepts
``--seed`` (falling back to the ACTIVELR_SEED environment variable, then
0) and ``--out``.
"""

import argparse
import json
import os
import socket
import sys

from .backbones import ADABELIEF, ADAMW, RADAM, SGD_MOMENTUM, BackboneConfig
from .core import MODE_ABSOLUTE, MODE_GAIN, ActiveConfig
from .harness import (BATCH_GRID, LR_GRID, RunConfig, batch_size_sweep,
                      lr_sensitivity_sweep, run_training, save_sweep,
                      write_trajectory)
from .mlp import two_clusters_task
from .objectives import OBJECTIVE_NAMES, named_objective
from .verification import (HIGH_ADD, HIGH_MULTIPLY, LOW_MULTIPLY, LOW_SUBTRACT,
                           check_step_advantage, sign_agreement_suite,
                           step_advantage_suite, walk_suite, walk_suite_summary)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2

OPTIMIZER_CHOICES = {
    "sgd": SGD_MOMENTUM,
    "adamw": ADAMW,
    "radam": RADAM,
    "adabelief": ADABELIEF,
}

MLP_TASK = "two-clusters-mlp"

# Per-function defaults for the paired toy scenarios.  The cubic trap
# needs many inner steps per epoch so the constant-step baseline can
# cover the distance to its nearest minimum within the epoch budget.
TOY_SCENARIOS = {
    "cubic": {"alpha": 1e-5, "epochs": 500, "steps_per_epoch": 1,
              "record_every": 1},
    "multimodal": {"alpha": 1e-3, "epochs": 1000, "steps_per_epoch": 1,
                   "record_every": 1},
    "saddle": {"alpha": 1e-3, "epochs": 100, "steps_per_epoch": 1,
               "record_every": 1},
}


class CliParser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; our contract reserves 2 for
    computational failures, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(sp, out_help):
    sp.add_argument("--seed", type=int, default=None,
                    help="random seed (default: ACTIVELR_SEED env var, then 0)")
    sp.add_argument("--out", default=None, help=out_help)


def build_parser() -> CliParser:
    parser = CliParser(
        prog="activelr",
        description="Per-parameter learning-rate adaptation: training runs, "
                    "guarantee checkers, sensitivity sweeps, and the "
                    "trajectory service.",
    )
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=CliParser,
                                metavar="{train,toy,verify,sweep,serve}")

    train = sub.add_parser(
        "train", help="run one configuration and write its trajectory",
        description="Run one training configuration and write the "
                    "trajectory to a .jsonl or .csv file.")
    train.add_argument("--objective", default="quadratic",
                       choices=OBJECTIVE_NAMES + (MLP_TASK,),
                       help="what to optimize (default: %(default)s)")
    train.add_argument("--optimizer", default="adamw",
                       choices=sorted(OPTIMIZER_CHOICES),
                       help="backbone update rule (default: %(default)s)")
    train.add_argument("--active", action="store_true",
                       help="adapt per-parameter step sizes at epoch boundaries")
    train.add_argument("--alpha0", type=float, default=1e-3,
                       help="base step size (default: %(default)g)")
    train.add_argument("--alpha-low", type=float, default=0.9,
                       help="multiplicative shrink factor (default: %(default)g)")
    train.add_argument("--alpha-high", type=float, default=0.1,
                       help="additive growth increment (default: %(default)g)")
    train.add_argument("--mode", choices=[MODE_ABSOLUTE, MODE_GAIN],
                       default=MODE_ABSOLUTE,
                       help="adapt step sizes directly or via a gain on "
                            "alpha0 (default: %(default)s)")
    train.add_argument("--batch-size", type=int, default=None,
                       help="mini-batch size for sample-based objectives "
                            "(default: full batch)")
    train.add_argument("--epochs", type=int, default=100,
                       help="outer-loop length (default: %(default)s)")
    train.add_argument("--steps-per-epoch", type=int, default=1,
                       help="inner steps per epoch for analytic objectives "
                            "(default: %(default)s)")
    train.add_argument("--weight-decay", type=float, default=0.0,
                       help="decoupled weight decay (default: %(default)g)")
    _add_common(train, "trajectory file, .jsonl or .csv "
                       "(default: train_<objective>_<optimizer>.jsonl)")

    toy = sub.add_parser(
        "toy", help="paired vanilla/active runs on the toy functions",
        description="Run the cubic-trap, multimodal, and saddle scenarios "
                    "with the constant-step and adaptive variants side by "
                    "side, writing one trajectory file per run.")
    toy.add_argument("--function", choices=sorted(TOY_SCENARIOS),
                     default=None,
                     help="run a single scenario (default: all three)")
    toy.add_argument("--optimizer", default="adamw",
                     choices=sorted(OPTIMIZER_CHOICES),
                     help="backbone update rule (default: %(default)s)")
    toy.add_argument("--alpha0", type=float, default=None,
                     help="override the scenario's base step size")
    toy.add_argument("--epochs", type=int, default=None,
                     help="override the scenario's epoch budget")
    _add_common(toy, "output directory for trajectory files (default: .)")

    verify = sub.add_parser(
        "verify", help="run the guarantee checkers and the step-size walk",
        description="Run the sign-agreement and step-advantage suites on "
                    "random convex quadratics plus the shrink/grow walk "
                    "ablation, and print a pass/fail table.")
    verify.add_argument("--cases", type=int, default=200,
                        help="cases per randomized suite (default: %(default)s)")
    verify.add_argument("--walk-seeds", type=int, default=30,
                        help="seeds per walk variant (default: %(default)s)")
    verify.add_argument("--objective", choices=OBJECTIVE_NAMES, default=None,
                        help="also check one named objective (must be convex)")
    _add_common(verify, "write the full JSON report here")

    sweep = sub.add_parser(
        "sweep", help="step-size or batch-size sensitivity sweep",
        description="Sweep base step size or batch size on the two-clusters "
                    "MLP task, comparing constant-step and adaptive "
                    "variants cell by cell.")
    sweep.add_argument("--kind", choices=["lr", "batch"], default="lr",
                       help="sweep axis (default: %(default)s)")
    sweep.add_argument("--task", choices=[MLP_TASK], default=MLP_TASK,
                       help="training task (default: %(default)s)")
    sweep.add_argument("--optimizer", default=None,
                       choices=sorted(OPTIMIZER_CHOICES),
                       help="single backbone to sweep (default: all four for "
                            "lr, sgd for batch)")
    sweep.add_argument("--seeds", type=int, default=3,
                       help="seeds per cell (default: %(default)s)")
    sweep.add_argument("--epochs", type=int, default=30,
                       help="epochs per run (default: %(default)s)")
    sweep.add_argument("--alpha0", type=float, default=0.05,
                       help="base step size for the batch sweep "
                            "(default: %(default)g)")
    sweep.add_argument("--batch-size", type=int, default=32,
                       help="batch size for the lr sweep (default: %(default)s)")
    _add_common(sweep, "report file (default: sweep_<kind>.json)")

    serve = sub.add_parser(
        "serve", help="start the local trajectory service",
        description="Serve the trajectory HTTP API (and optionally the "
                    "playground's static files) for the browser UI.")
    serve.add_argument("--host", default="127.0.0.1",
                       help="bind address (default: %(default)s)")
    serve.add_argument("--port", type=int, default=8787,
                       help="TCP port (default: %(default)s)")
    serve.add_argument("--max-iters", type=int, default=10_000,
                       help="per-request iteration cap (default: %(default)s)")
    serve.add_argument("--static", default=None, metavar="DIR",
                       help="also serve this directory at / (the built "
                            "playground)")
    _add_common(serve, "write the resolved service config as JSON before "
                       "serving")
    return parser


def resolve_seed(args, parser) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("ACTIVELR_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        parser.error(f"ACTIVELR_SEED must be an integer, got {env!r}")


def _build_objective(name, seed):
    if name == MLP_TASK:
        return two_clusters_task(seed)
    return named_objective(name)


def cmd_train(args, parser) -> int:
    seed = resolve_seed(args, parser)
    obj = _build_objective(args.objective, seed)
    try:
        cfg = RunConfig(
            alpha=args.alpha0,
            backbone=BackboneConfig(kind=OPTIMIZER_CHOICES[args.optimizer],
                                    weight_decay=args.weight_decay),
            active=args.active,
            active_cfg=(ActiveConfig(alpha0=args.alpha0,
                                     alpha_high=args.alpha_high,
                                     alpha_low=args.alpha_low,
                                     mode=args.mode)
                        if args.active else None),
            epochs=args.epochs,
            steps_per_epoch=args.steps_per_epoch,
            batch_size=args.batch_size,
            seed=seed,
        )
    except ValueError as exc:
        parser.error(str(exc))
    out = args.out or f"train_{args.objective}_{args.optimizer}.jsonl"
    try:
        traj = run_training(obj, cfg)
    except ValueError as exc:
        parser.error(str(exc))
    write_trajectory(traj, out)
    final = traj.final
    print(f"wrote {out}: epochs_run={final['epochs_run']} "
          f"final_loss={final['final_loss']} diverged={final['diverged']}")
    return EXIT_FAILURE if traj.diverged else EXIT_OK


def cmd_toy(args, parser) -> int:
    seed = resolve_seed(args, parser)
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    functions = [args.function] if args.function else sorted(TOY_SCENARIOS)
    code = EXIT_OK
    for fn in functions:
        scenario = TOY_SCENARIOS[fn]
        for active in (False, True):
            obj = named_objective(fn)
            cfg = RunConfig(
                alpha=args.alpha0 if args.alpha0 is not None else scenario["alpha"],
                backbone=BackboneConfig(kind=OPTIMIZER_CHOICES[args.optimizer]),
                active=active,
                epochs=args.epochs if args.epochs is not None else scenario["epochs"],
                steps_per_epoch=scenario["steps_per_epoch"],
                record_every=scenario["record_every"],
                seed=seed,
                stop_when_escaped=True,
            )
            traj = run_training(obj, cfg)
            variant = "active" if active else "vanilla"
            path = os.path.join(outdir, f"toy_{fn}_{variant}.jsonl")
            write_trajectory(traj, path)
            final = traj.final
            print(f"wrote {path}: epochs_run={final['epochs_run']} "
                  f"final_loss={final['final_loss']} escaped={final['escaped']} "
                  f"diverged={final['diverged']}")
            if traj.diverged:
                code = EXIT_FAILURE
    return code


def cmd_verify(args, parser) -> int:
    seed = resolve_seed(args, parser)
    if args.cases < 1:
        parser.error(f"--cases must be >= 1, got {args.cases}")
    if args.walk_seeds < 1:
        parser.error(f"--walk-seeds must be >= 1, got {args.walk_seeds}")

    rows = []
    report = {}

    single = None
    if args.objective is not None:
        obj = named_objective(args.objective)
        try:
            single = check_step_advantage(
                obj, obj.default_init, alpha=0.05, alpha_high_eff=0.1,
                alpha_low_eff=0.01, prior_grad=obj.grad(obj.default_init))
        except ValueError as exc:
            parser.error(str(exc))
        ok = single.lhs >= single.rhs
        rows.append((f"step-advantage on {args.objective} "
                     f"(lhs={single.lhs:.3g}, rhs={single.rhs:.3g})", ok))
        report["single_objective"] = {"objective": args.objective,
                                      **single.to_json()}

    sign = sign_agreement_suite(n_cases=args.cases, seed=seed)
    rows.append((f"sign-agreement suite ({sign.n_cases} cases, "
                 f"{sign.n_diverged} diverged)", sign.passed))
    advantage = step_advantage_suite(n_cases=args.cases, seed=seed)
    rows.append((f"step-advantage suite ({advantage.n_cases} cases)",
                 advantage.passed))

    walks = walk_suite(seeds=range(seed, seed + args.walk_seeds))
    summary = walk_suite_summary(walks)
    ma = summary[f"{LOW_MULTIPLY}/{HIGH_ADD}"]
    rows.append((f"walk multiply/add stays positive "
                 f"(mean={ma['grand_mean']:.3f}, std={ma['grand_std']:.3f})",
                 not ma["any_crossed_zero"]
                 and abs(ma["grand_mean"] - 1.0) <= 0.1
                 and abs(ma["grand_std"] - 0.3) <= 0.07))
    for key in (f"{LOW_SUBTRACT}/{HIGH_ADD}", f"{LOW_SUBTRACT}/{HIGH_MULTIPLY}"):
        rows.append((f"walk {key} crosses zero", summary[key]["all_crossed_zero"]))
    mm = summary[f"{LOW_MULTIPLY}/{HIGH_MULTIPLY}"]
    rows.append((f"walk multiply/multiply collapses (min={mm['min']:.2e})",
                 mm["min"] < 1e-2))

    report["suites"] = {"sign_agreement": sign.to_json(),
                        "step_advantage": advantage.to_json()}
    report["walks"] = summary

    width = max(len(name) for name, _ in rows)
    for name, ok in rows:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}")
    all_ok = all(ok for _, ok in rows)
    print(f"{'all checks passed' if all_ok else 'some checks FAILED'}")

    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
        print(f"wrote {args.out}")
    return EXIT_OK if all_ok else EXIT_FAILURE


def cmd_sweep(args, parser) -> int:
    seed = resolve_seed(args, parser)
    if args.seeds < 1:
        parser.error(f"--seeds must be >= 1, got {args.seeds}")
    if args.epochs < 1:
        parser.error(f"--epochs must be >= 1, got {args.epochs}")

    def factory(s):
        return two_clusters_task(s)

    base = RunConfig(alpha=args.alpha0, epochs=args.epochs,
                     batch_size=args.batch_size, record_every=1_000_000)
    seeds = range(seed, seed + args.seeds)
    if args.kind == "lr":
        backbones = ([OPTIMIZER_CHOICES[args.optimizer]] if args.optimizer
                     else list(OPTIMIZER_CHOICES[k] for k in sorted(OPTIMIZER_CHOICES)))
        report = lr_sensitivity_sweep(factory, base, alphas=LR_GRID,
                                      backbones=backbones, seeds=seeds)
    else:
        backbone = OPTIMIZER_CHOICES[args.optimizer or "sgd"]
        report = batch_size_sweep(factory, base, batch_sizes=BATCH_GRID,
                                  backbones=[backbone], seeds=seeds,
                                  metric="final_accuracy")
    out = args.out or f"sweep_{args.kind}.json"
    save_sweep(report, out)
    for cell in report.cells:
        variant = "active" if cell.active else "vanilla"
        mean = "divergent" if cell.mean is None else f"{cell.mean:.4g}"
        print(f"{cell.backbone:>12} {variant:>7} {str(cell.key):>7}: "
              f"{cell.metric}={mean} (n_diverged={cell.n_diverged})")
    for backbone in sorted({c.backbone for c in report.cells}):
        for active in (False, True):
            spread = report.spread(backbone, active)
            variant = "active" if active else "vanilla"
            shown = "n/a" if spread is None else f"{spread:.4g}"
            print(f"spread {backbone} {variant}: {shown}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_serve(args, parser) -> int:
    resolve_seed(args, parser)
    if args.port < 1 or args.port > 65535:
        parser.error(f"--port must lie in [1, 65535], got {args.port}")
    if args.max_iters < 1:
        parser.error(f"--max-iters must be >= 1, got {args.max_iters}")
    if args.static is not None and not os.path.isdir(args.static):
        parser.error(f"--static directory not found: {args.static}")

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        print(f"activelr serve: cannot bind {args.host}:{args.port}: {exc}",
              file=sys.stderr)
        return EXIT_USAGE
    finally:
        probe.close()

    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"host": args.host, "port": args.port,
                       "max_iters": args.max_iters}, fh, indent=2)
            fh.write("\n")

    import uvicorn
    from .service import create_app
    app = create_app(max_iters=args.max_iters, static_dir=args.static)
    print(f"serving on http://{args.host}:{args.port} "
          f"(max {args.max_iters} iterations per request)")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"train": cmd_train, "toy": cmd_toy, "verify": cmd_verify,
                "sweep": cmd_sweep, "serve": cmd_serve}
    return handlers[args.command](args, parser)


if __name__ == "__main__":
    sys.exit(main())
