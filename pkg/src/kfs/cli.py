"""Command-line front end: ``kfs bounds | experiment | fit | classify``.

Every command accepts ``--config FILE`` (flat ``key = value`` lines using the
long option names); flags given on the command line override file values.
Exit codes: 0 success, 1 a bound-soundness check failed, 2 invalid
configuration, 3 infeasible scenario.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
import time
from pathlib import Path

import numpy as np

from kfs import bounds as B
from kfs import experiments as E
from kfs import io
from kfs.errors import DomainError, InfeasibleError
from kfs.fewshot import ConstantPredictor, FewShotModel, Optimize, fit
from kfs.kernels import Kernel, SupportSample

log = logging.getLogger("kfs")

EXPERIMENTS = ("quasi-orth", "separability", "verify-quasi-orth", "verify-lhd", "verify-fewshot", "estimate-beta")
BOUNDS = ("quasi-orth", "quasi-orth-norm", "lhd-upper", "lhd-two-sided", "p-n", "p-e")

EXIT_OK, EXIT_UNSOUND, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2, 3


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------- argument types


def _split(text) -> list[str]:
    if isinstance(text, list):
        return text
    return [t.strip() for t in str(text).split(",") if t.strip()]


def float_list(text) -> list[float]:
    return [float(t) for t in _split(text)]


def int_list(text) -> list[int]:
    return [int(t) for t in _split(text)]


def kernel_list(text) -> list[Kernel]:
    return [Kernel.parse(t) for t in _split(text)]


def positive_int(text) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def seed_type(text) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def boolean(text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def delta_policy(text):
    return "optimize" if str(text).strip().lower() == "optimize" else float(text)


def theta_policy(text):
    t = str(text).strip().lower()
    return t if t in ("min", "midrange", "max", "optimize") else float(text)


def beta_spec(text):
    return "n" if str(text).strip().lower() == "n" else float(text)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; command-line flags override it")
    common.add_argument("--seed", type=seed_type, help="master seed (required for experiments)")
    common.add_argument("--workers", type=positive_int, default=1)
    common.add_argument("--out", default="-", help="output path ('-' for standard output)")

    parser = argparse.ArgumentParser(prog="kfs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common], help="evaluate closed-form bounds over a parameter grid")
    p.add_argument("--bound", type=_split, default="quasi-orth", help=f"comma list of {', '.join(BOUNDS)}")
    p.add_argument("--kernel", type=kernel_list, default="linear")
    p.add_argument("--n", type=int_list, default="100")
    p.add_argument("--k", type=int_list, default="5")
    p.add_argument("--delta", type=float_list, default="0.5")
    p.add_argument("--epsilon", type=float_list, default="0.1")
    p.add_argument("--theta", type=float_list, default="0.5")
    p.add_argument("--Delta", dest="Delta", type=float_list, default="1.0")
    p.add_argument("--A", dest="A", type=float, default=1.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--C", dest="C", type=float, default=1.0)
    p.add_argument("--C-star", dest="C_star", type=float, default=1.0)
    p.add_argument("--beta", type=beta_spec, default="n", help="effective dimension: a number, or 'n'")
    p.add_argument("--normalized", type=boolean, default=True)

    p = sub.add_parser("experiment", parents=[common], help="run a seeded Monte Carlo experiment")
    p.add_argument("name", nargs="?", choices=EXPERIMENTS)
    p.add_argument("--kernel", type=kernel_list, default="linear")
    p.add_argument("--n", type=int_list, default="10")
    p.add_argument("--k", type=int_list, default="5")
    p.add_argument("--delta", type=float_list, default="0.2")
    p.add_argument("--epsilon", type=float_list, default="0.1")
    p.add_argument("--theta", type=theta_policy, default="midrange")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--eval-draws", type=int, default=1000)
    p.add_argument("--set-size", type=int_list, default=str(E.DEFAULT_SET_SIZE))
    p.add_argument("--r-x", type=float, default=1.0)
    p.add_argument("--r-y", type=float, default=1.0)
    p.add_argument("--c-y", type=float, default=None, help="distance of the new-class centre from the origin")
    p.add_argument("--normalized", type=boolean, default=True)
    p.add_argument("--region", choices=("ball", "cube"), default="ball")
    p.add_argument("--radii", type=float_list, default=None, help="feature-space radii (default: pilot quantiles)")
    p.add_argument("--anchors", default=None, help="vectors file whose kernel mean is the centre (default: origin)")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--block", type=int, default=E.DEFAULT_BLOCK)
    p.add_argument("--bootstrap", type=int, default=200)

    p = sub.add_parser("fit", parents=[common], help="fit a few-shot model to a support vectors file")
    p.add_argument("--kernel", type=Kernel.parse, default="linear")
    p.add_argument("--support", required=False, help="vectors file with the k support points")
    p.add_argument("--label", default="new")
    p.add_argument("--r-y", type=float, default=None)
    p.add_argument("--delta", type=delta_policy, default=0.5)
    p.add_argument("--theta", type=theta_policy, default="midrange")
    p.add_argument("--r-x", type=float, default=None, help="old-class radius for delta optimisation (default r_y)")
    p.add_argument("--A-x", dest="A_x", type=float, default=1.0)
    p.add_argument("--A-y", dest="A_y", type=float, default=1.0)
    p.add_argument("--C", dest="C", type=float, default=1.0)
    p.add_argument("--C-star", dest="C_star", type=float, default=1.0)
    p.add_argument("--beta", type=beta_spec, default="n")
    p.add_argument("--grid", type=positive_int, default=B.DEFAULT_GRID)

    p = sub.add_parser("classify", parents=[common], help="label a vectors file with a fitted model")
    p.add_argument("--model", required=False)
    p.add_argument("--input", required=False)
    p.add_argument("--base-label", default="base", help="label of the constant stand-in base classifier")
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            cfg = io.read_config(known.config)
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read config {known.config}: {e}") from None
        sub = _subparser(parser, argv)
        if sub is not None:
            dests = {a.dest for a in sub._actions}
            unknown = set(cfg) - dests
            if unknown:
                raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
            sub.set_defaults(**cfg)
    return parser.parse_args(argv)


def _subparser(parser: argparse.ArgumentParser, argv):
    for action in parser._subparsers._group_actions:
        for word in argv:
            if word in action.choices:
                return action.choices[word]
    return None


# ---------------------------------------------------------------- output


def emit(args, text: str) -> None:
    if args.out == "-":
        sys.stdout.write(text)
    else:
        io.write_atomic(args.out, text)


# ---------------------------------------------------------------- bounds


def _profile(beta, n: int) -> B.DimensionProfile:
    return B.DimensionProfile.identity(n) if beta == "n" else B.DimensionProfile.constant(beta)


def cmd_bounds(args) -> int:
    unknown = [b for b in args.bound if b not in BOUNDS]
    if unknown:
        raise ConfigError(f"unknown bound(s) {unknown}; choose from {', '.join(BOUNDS)}")
    rows = []
    grid = itertools.product(args.bound, args.kernel, args.n, args.k, args.delta, args.epsilon, args.theta, args.Delta)
    for name, kernel, n, k, delta, eps, theta, Delta in grid:
        try:
            p = B.BoundParams(
                A=args.A, r=args.r, k=k, delta=delta, epsilon=eps, profile=_profile(args.beta, n), C=args.C, C_star=args.C_star
            )
            value = {
                "quasi-orth": lambda: B.quasi_orth_bound(p, n),
                "quasi-orth-norm": lambda: B.quasi_orth_norm_bound(p, n),
                "lhd-upper": lambda: B.lhd_upper_prob(p, n),
                "lhd-two-sided": lambda: B.lhd_two_sided_prob(p, n),
                "p-n": lambda: B.p_n_bound(p, Delta, theta, n, normalized=args.normalized),
                "p-e": lambda: B.p_e_bound(p, theta, n),
            }[name]()
        except (ValueError, DomainError) as e:
            raise ConfigError(f"{name} at n={n}, k={k}, delta={delta}, epsilon={eps}, theta={theta}, Delta={Delta}: {e}")
        rows.append(
            dict(
                bound=name, kernel=kernel.spec, n=n, k=k, delta=delta, epsilon=eps,
                theta=theta if name in ("p-n", "p-e") else None,
                Delta=Delta if name == "p-n" else None,
                A=args.A, r=args.r, C=args.C, C_star=args.C_star, beta=float(B.beta_at(p.profile, 0.0, n)),
                normalized=args.normalized if name == "p-n" else None,
                raw=value.raw, clamped=value.clamped, vacuous=value.vacuous,
            )  # fmt: skip
        )
    emit(args, io.render_csv(io.BOUNDS_COLUMNS, rows))
    return EXIT_OK


# ---------------------------------------------------------------- experiments


def _validate_experiment(args) -> None:
    if args.name is None:
        raise ConfigError("experiment name required: " + ", ".join(EXPERIMENTS))
    if args.seed is None:
        raise ConfigError("--seed is required; experiments never fall back to a time-based seed")
    for name in ("trials", "eval_draws", "samples", "block", "bootstrap"):
        if getattr(args, name) < 1:
            raise ConfigError(f"--{name.replace('_', '-')} must be >= 1")
    if any(n < 1 for n in args.n) or any(k < 1 for k in args.k) or any(s < 1 for s in args.set_size):
        raise ConfigError("n, k and set-size must all be >= 1")
    if args.r_x <= 0 or args.r_y <= 0:
        raise ConfigError("radii must be positive")
    if args.name.startswith("verify-"):
        if any(k.kind != "linear" for k in args.kernel):
            raise ConfigError(f"{args.name} verifies bounds in the identity-map regime; use --kernel linear")
        for d in args.delta + args.epsilon:
            if not 0 < d < 1:
                raise ConfigError(f"delta and epsilon must lie in (0, 1), got {d}")
    if args.name == "estimate-beta" and args.samples % args.block:
        raise ConfigError("--samples must be a multiple of --block")


def _verify_rows(kernel, n, k, delta, eps, verification: E.Verification):
    for event, agg in verification.results.items():
        yield dict(
            kernel=kernel.spec, n=n, k=k, delta=delta, epsilon=eps, event=event, trials=agg.trials,
            frequency=agg.frequency, ci_lo=agg.ci_lo, ci_hi=agg.ci_hi, bound_raw=agg.bound.raw,
            bound_clamped=agg.bound.clamped, vacuous=agg.bound.vacuous, **{"pass": agg.passes},
        )  # fmt: skip


def run_experiment(args) -> tuple[list[str], list[dict], dict]:
    """Run the configured experiment grid; returns (columns, rows, flags)."""
    name, seed, workers = args.name, args.seed, args.workers
    rows: list[dict] = []
    flags: dict = {"passes": True}

    if name == "quasi-orth":
        for kernel, n, delta in itertools.product(args.kernel, args.n, args.delta):
            stream = E.RngStream.for_experiment(seed, name, kernel.spec, n, delta)
            agg = E.estimate_pairwise_quasi_orth(kernel, n, delta, args.trials, stream, workers)
            log.info("%s %s n=%d delta=%g: %.4f", name, kernel, n, delta, agg.frequency)
            rows.append(dict(kernel=kernel.spec, n=n, delta=delta, trials=agg.trials,
                             frequency=agg.frequency, ci_lo=agg.ci_lo, ci_hi=agg.ci_hi))  # fmt: skip
        return io.QUASI_ORTH_COLUMNS, rows, flags

    if name == "separability":
        for kernel, n, m in itertools.product(args.kernel, args.n, args.set_size):
            stream = E.RngStream.for_experiment(seed, name, kernel.spec, n, m)
            agg = E.estimate_separability(kernel, n, m, args.trials, stream, workers)
            log.info("%s %s n=%d set_size=%d: %.4f", name, kernel, n, m, agg.frequency)
            rows.append(dict(kernel=kernel.spec, n=n, set_size=m, trials=agg.trials,
                             frequency=agg.frequency, ci_lo=agg.ci_lo, ci_hi=agg.ci_hi))  # fmt: skip
        return io.SEPARABILITY_COLUMNS, rows, flags

    if name in ("verify-quasi-orth", "verify-lhd"):
        verify = E.verify_quasi_orth if name == "verify-quasi-orth" else E.verify_lhd
        for kernel, n, k, delta, eps in itertools.product(args.kernel, args.n, args.k, args.delta, args.epsilon):
            scenario = E.SyntheticScenario(n, E.Ball.at(n, args.c_y or 0.0, args.r_y), kernel)
            stream = E.RngStream.for_experiment(seed, name, kernel.spec, n, k, delta, eps, args.r_y, args.c_y)
            v = verify(scenario, k, delta, eps, args.trials, stream, workers)
            flags["passes"] &= v.passes
            log.info("%s n=%d k=%d delta=%g epsilon=%g: %s", name, n, k, delta, eps, "pass" if v.passes else "FAIL")
            rows.extend(_verify_rows(kernel, n, k, delta, eps, v))
        return io.VERIFY_COLUMNS, rows, flags

    if name == "verify-fewshot":
        offset = 3.0 if args.c_y is None else args.c_y
        flags["infeasible"] = {}
        for kernel, n, k, delta in itertools.product(args.kernel, args.n, args.k, args.delta):
            scenario = E.SyntheticScenario.separated(n, offset, args.r_x, args.r_y, kernel)
            stream = E.RngStream.for_experiment(seed, name, kernel.spec, n, k, delta, args.theta, args.r_x, args.r_y, offset)
            v = E.verify_fewshot(
                scenario, k, args.trials, stream, eval_draws=args.eval_draws, delta=delta,
                theta=args.theta, normalized=args.normalized, workers=workers,
            )  # fmt: skip
            flags["passes"] &= v.passes
            bad = v.notes["infeasible"]
            if bad:
                flags["infeasible"][f"n={n},k={k},delta={delta}"] = len(bad)
            if v.notes["infeasible_flag"]:
                log.warning("%s n=%d k=%d: %d of %d trials infeasible", name, n, k, len(bad), args.trials)
            log.info("%s n=%d k=%d delta=%g: %s", name, n, k, delta, "pass" if v.passes else "FAIL")
            rows.extend(_verify_rows(kernel, n, k, delta, None, v))
        return io.VERIFY_COLUMNS, rows, flags

    if name == "estimate-beta":
        for kernel, n in itertools.product(args.kernel, args.n):
            if args.anchors:
                anchors = io.read_vectors(args.anchors)
                if anchors.shape[1] != n:
                    raise ConfigError(f"anchors have dimension {anchors.shape[1]}, expected n={n}")
            else:
                anchors = np.zeros((1, n))
            region = E.Ball.at(n) if args.region == "ball" else E.Cube(n)
            stream = E.RngStream.for_experiment(seed, name, kernel.spec, n, args.region, args.radii, args.samples)
            est = E.estimate_beta(
                kernel, region, anchors, args.radii, args.samples, stream,
                block=args.block, bootstrap=args.bootstrap, workers=workers,
            )  # fmt: skip
            if est.degenerate:
                flags.setdefault("degenerate", []).append(f"{kernel.spec},n={n}")
            log.info("%s %s n=%d: beta_hat=%.4f [%.4f, %.4f]", name, kernel, n, est.beta_hat, est.ci_lo, est.ci_hi)
            for r, v in zip(est.radii, est.volumes):
                rows.append(dict(kernel=kernel.spec, n=n, radius=r, volume_est=v, beta_hat=est.beta_hat,
                                 beta_ci_lo=est.ci_lo, beta_ci_hi=est.ci_hi))  # fmt: skip
        return io.BETA_COLUMNS, rows, flags

    raise ConfigError(f"unknown experiment {name!r}")


def cmd_experiment(args) -> int:
    _validate_experiment(args)
    started = time.perf_counter()
    columns, rows, flags = run_experiment(args)
    emit(args, io.render_csv(columns, rows))
    if args.out != "-":
        config = {k: v for k, v in vars(args).items() if k not in ("command",)}
        config["kernel"] = [k.spec for k in args.kernel]
        io.write_manifest(
            args.out,
            {
                "command": "experiment",
                "experiment": args.name,
                "seed": args.seed,
                "workers": args.workers,
                "config": config,
                "rows": len(rows),
                "flags": flags,
                "environment": io.environment(),
                "wall_time_s": round(time.perf_counter() - started, 3),
            },
        )
    return EXIT_OK if flags["passes"] else EXIT_UNSOUND


# ---------------------------------------------------------------- fit / classify


def cmd_fit(args) -> int:
    if not args.support:
        raise ConfigError("--support is required")
    if args.r_y is None or args.r_y <= 0:
        raise ConfigError("--r-y must be given and positive")
    points = io.read_vectors(args.support)
    Z = SupportSample(points, args.label, args.kernel)
    delta = args.delta
    if delta == "optimize":
        n = Z.n
        prof = _profile(args.beta, n)
        y = B.BoundParams(A=args.A_y, r=args.r_y, k=Z.k, delta=0.5, epsilon=0.5, profile=prof, C=args.C, C_star=args.C_star)
        x = y.replace(A=args.A_x, r=args.r_x or args.r_y)
        delta = Optimize(y, n, x, args.grid)
    model = fit(args.kernel, Z, args.r_y, delta=delta, theta=args.theta)
    emit(args, model.dumps())
    log.info("fitted: D=%.6g delta=%.6g Delta=%.6g theta=%.6g", model.D, model.delta, model.Delta, model.theta)
    return EXIT_OK


def cmd_classify(args) -> int:
    if not args.model or not args.input:
        raise ConfigError("--model and --input are required")
    model = FewShotModel.load(args.model)
    X = io.read_vectors(args.input)
    if X.shape[1] != model.n:
        raise ConfigError(f"input vectors have dimension {X.shape[1]}, model expects {model.n}")
    base = ConstantPredictor(args.base_label)
    lines = [ln.strip() for ln in Path(args.input).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    out = [f"{ln},{model.classify(x, base)}" for ln, x in zip(lines, X)]
    emit(args, "\n".join(out) + "\n")
    return EXIT_OK


COMMANDS = {"bounds": cmd_bounds, "experiment": cmd_experiment, "fit": cmd_fit, "classify": cmd_classify}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        try:
            args = parse_args(argv)
        except SystemExit as e:  # argparse usage errors and --help
            return e.code if isinstance(e.code, int) else EXIT_CONFIG
        return COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"kfs: error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as e:
        print(f"kfs: infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, DomainError) as e:
        print(f"kfs: error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
