"""Command-line driver: ``kerrkernel <command> [options]``.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
from dataclasses import asdict, dataclass, field
import math
from pathlib import Path
import sys
import warnings

import numpy as np
from scipy import stats

from . import io
from .errors import (
    CutoffExceededError,
    DomainError,
    KerrKernelError,
    NumericalInconsistencyError,
    ShapeMismatchError,
    TruncationError,
)
from .fock import ANALYTIC_POLICY, EXPERIMENT_POLICY, TruncationPolicy
from .kernels import KERNEL_KINDS, KernelSpec, gram_exact, gram_sampled
from .learn import SvmModel, sequential_run, write_trace_csv
from .learn.pipeline import Dataset, decision_mesh, grid_search, predict_points, run_experiment
from .lossmodel import LossParams, damped_decision, damped_state, decision_cross_section, write_cross_section_csv
from .measure import (
    DisplacementPair,
    decision_1mode,
    decision_2mode,
    label_points,
    load_displacement_sets,
    sample_displacements,
    save_displacement_sets,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class ExperimentConfig:
    seed: int | None = None
    alpha0: float = 1.0
    r0: float = 0.0
    cutoff: int = EXPERIMENT_POLICY.cutoff
    tail_tol: float = EXPERIMENT_POLICY.tail_tol
    kernel: str = "kerr-coherent-2mode"
    C: float = 1.0
    gamma: float | str = "scale"
    split: float = 0.7
    data: str | None = None
    set_name: str | None = None
    extra: dict = field(default_factory=dict)

    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(self.cutoff, self.tail_tol)

    def kernel_spec(self) -> KernelSpec:
        return KernelSpec(self.kernel, self.alpha0, self.r0, self.gamma, self.policy())

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(d.pop("extra"))
        return d


def _gamma(value: str) -> float | str:
    if value == "scale":
        return value
    try:
        g = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"gamma must be a number or 'scale', got {value!r}") from None
    if not g > 0:
        raise argparse.ArgumentTypeError("gamma must be positive")
    return g


def _floats(value: str) -> list[float]:
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}") from None


def _split(value: str) -> float:
    f = float(value)
    if not 0 < f < 1:
        raise argparse.ArgumentTypeError("split must lie in (0, 1)")
    return f


def _complex(value: str) -> complex:
    """Parse 're,im' or a Python complex literal."""
    try:
        if "," in value:
            re, im = value.split(",")
            return complex(float(re), float(im))
        return complex(value.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse complex value {value!r}") from None


def _add_physics(p, cutoff=EXPERIMENT_POLICY.cutoff, tail_tol=EXPERIMENT_POLICY.tail_tol):
    p.add_argument("--alpha0", type=float, default=1.0, help="fiducial coherent amplitude")
    p.add_argument("--r0", type=float, default=0.0, help="squeezing parameter")
    p.add_argument("--cutoff", type=int, default=cutoff, help="Fock cutoff per mode")
    p.add_argument("--tail-tol", type=float, default=tail_tol, help="max probability beyond the cutoff")


def _policy(args) -> TruncationPolicy:
    return TruncationPolicy(args.cutoff, args.tail_tol)


def _pair(args) -> DisplacementPair:
    if args.displacements:
        raw = io.read_json(args.displacements)
        items = raw if isinstance(raw, list) else [raw]
        pairs = [DisplacementPair.from_json(o) for o in items]
        if args.set:
            pairs = [p for p in pairs if p.name == args.set]
            if not pairs:
                raise UsageError(f"no displacement named {args.set!r} in {args.displacements}")
        return pairs[0]
    sets = load_displacement_sets()
    name = args.set or "munu1"
    if name not in sets:
        raise UsageError(f"unknown displacement set {name!r}; choose from {sorted(sets)}")
    return sets[name]


# -- commands -----------------------------------------------------------------


def describe(points: np.ndarray) -> dict:
    """Per-column summary: count, mean, std, min, quartiles, max, skew, kurtosis."""
    out = {}
    for k, col in enumerate(points.T):
        n = col.size
        q = np.quantile(col, [0.25, 0.5, 0.75])
        out[f"x{k + 1}"] = {
            "count": n,
            "mean": float(col.mean()),
            "std": float(col.std(ddof=1)) if n > 1 else float("nan"),
            "min": float(col.min()),
            "25%": float(q[0]),
            "50%": float(q[1]),
            "75%": float(q[2]),
            "max": float(col.max()),
            "skew": float(stats.skew(col, bias=False)) if n > 2 else float("nan"),
            "kurtosis": float(stats.kurtosis(col, bias=False)) if n > 3 else float("nan"),
        }
    return out


def cmd_gen_data(args) -> int:
    if args.n < 1:
        raise UsageError("n must be >= 1")
    pts = np.random.default_rng(args.seed).random((args.n, 2))
    io.write_points(args.out, pts)
    summary = describe(pts)
    rows = list(next(iter(summary.values())))
    print(f"{'':>9}" + "".join(f"{c:>14}" for c in summary))
    for r in rows:
        print(f"{r:>9}" + "".join(f"{summary[c][r]:>14.6g}" for c in summary))
    return EXIT_OK


def cmd_sample_displacements(args) -> int:
    pairs = sample_displacements(args.sigma, args.count, args.seed, args.max_abs2)
    save_displacement_sets(pairs, args.out)
    for p in pairs:
        print(f"{p.name}: mu={p.mu:.6f} nu={p.nu:.6f}")
    return EXIT_OK


def cmd_label(args) -> int:
    pts, _ = io.read_points(args.data)
    pair = _pair(args)
    mean_n = abs(args.alpha0) ** 2 + math.sinh(args.r0) ** 2
    if args.cutoff < mean_n:
        warnings.warn(f"cutoff {args.cutoff} is below the mean photon number {mean_n:.3g}", RuntimeWarning)
    labels = label_points(pts, pair, args.alpha0, args.r0, _policy(args))
    io.write_points(args.out, pts, labels)
    n = labels.size
    plus = int(np.sum(labels == 1))
    summary = {
        "set_name": pair.name,
        "count": n,
        "counts": {"+1": plus, "-1": n - plus},
        "proportions": {"+1": plus / n, "-1": (n - plus) / n},
        "alpha0": args.alpha0,
        "r0": args.r0,
        "cutoff": args.cutoff,
    }
    if args.summary:
        io.write_json(args.summary, summary)
    print(f"{pair.name}: +1 {plus} ({plus / n:.4f})  -1 {n - plus} ({(n - plus) / n:.4f})")
    return EXIT_OK


def _train_config(args) -> ExperimentConfig:
    return ExperimentConfig(
        seed=args.seed, alpha0=args.alpha0, r0=args.r0, cutoff=args.cutoff, tail_tol=args.tail_tol,
        kernel=args.kernel, C=args.C, gamma=args.gamma, split=args.split, data=str(args.data),
        set_name=args.name or Path(args.data).stem,
    )


def cmd_train(args) -> int:
    cfg = _train_config(args)
    pts, labels = io.read_points(cfg.data)
    if labels is None:
        raise UsageError(f"{cfg.data} has no label column")
    ds = Dataset(pts, labels, cfg.set_name)
    result = run_experiment(ds, cfg.kernel_spec(), cfg.C, cfg.seed, cfg.split, require_two_classes=True)
    report = dict(result.report)
    report["config"] = cfg.to_dict()
    io.write_json(args.report, report)
    if args.model:
        result.model.save(args.model)
    if args.mesh:
        io.write_rows(args.mesh, ["x1", "x2", "label"], decision_mesh(result.model, args.mesh_step))
    m = result.metrics
    print(f"{cfg.set_name} [{cfg.kernel}] C={cfg.C}: accuracy {m.accuracy:.4f} precision {m.precision:.4f} "
          f"recall {m.recall:.4f} f1 {m.f1:.4f} support {result.model.n_support}")
    return EXIT_OK


def cmd_predict(args) -> int:
    model = SvmModel.load(args.model)
    pts, _ = io.read_points(args.data)
    pred = predict_points(model, pts)
    io.write_points(args.out, pts, pred)
    return EXIT_OK


def _grid(args):
    re = np.linspace(args.re_min, args.re_max, args.steps)
    im = np.linspace(args.im_min, args.im_max, args.steps)
    return re, im


def cmd_wigner(args) -> int:
    policy = _policy(args)
    re, im = _grid(args)
    rows = []
    if args.x2 is not None:
        if args.gamma:
            raise UsageError("loss is modelled for the one-mode encoding only")
        x = (args.x, args.x2)
        for a in re:
            for b in im:
                d = decision_2mode(DisplacementPair(complex(a, b), args.nu), x, args.alpha0, args.r0, policy)
                rows.append((a, b, d))
    elif args.gamma:
        params = LossParams.for_encoding(args.x, args.gamma / args.chi, args.chi)
        rho = damped_state(args.alpha0, params, policy)
        for a in re:
            for b in im:
                rows.append((a, b, damped_decision(complex(a, b), params, args.alpha0, policy, rho=rho)))
    else:
        for a in re:
            for b in im:
                rows.append((a, b, decision_1mode(complex(a, b), args.x, args.alpha0, policy)))
    io.write_rows(args.out, ["re", "im", "d_value"], rows)
    print(f"{len(rows)} points; min d = {min(r[2] for r in rows):.6f}")
    return EXIT_OK


def cmd_sequential(args) -> int:
    records = sequential_run(
        args.x, args.label, args.alpha0, args.mu0, args.epochs, args.shots, args.eta, args.seed,
        args.gradient_mode, policy=_policy(args),
    )
    write_trace_csv(records, args.out)
    first, last = records[0], records[-1]
    print(f"epochs {len(records)}: error {first.avg_error:.4f} -> {last.avg_error:.4f}, mu -> {last.mu:.5f}")
    return EXIT_OK


def cmd_kernel(args) -> int:
    pts, _ = io.read_points(args.points)
    spec = KernelSpec(args.kind, args.alpha0, args.r0, args.gamma, _policy(args))
    if args.mode == "sampled":
        if args.seed is None:
            raise UsageError("--seed is required for sampled Gram matrices")
        gram = gram_sampled(pts, spec, args.shots, args.seed)
    else:
        gram = gram_exact(pts, spec)
    gram.to_csv(args.out)
    print(f"{gram.shape[0]}x{gram.shape[1]} {gram.provenance} Gram; min eigenvalue {gram.min_eigenvalue():.4g}")
    return EXIT_OK


def cmd_loss_sweep(args) -> int:
    alphas = np.linspace(args.re_min, args.re_max, args.steps)
    gammas = [g * args.chi for g in args.gammas]
    rows = decision_cross_section(alphas, gammas, args.x, args.alpha0, args.chi, _policy(args))
    write_cross_section_csv(rows, args.out)
    for g in gammas:
        print(f"gamma={g:g}: min d = {min(d for _, d, gg in rows if gg == g):.6f}")
    return EXIT_OK


def cmd_grid_search(args) -> int:
    pts, labels = io.read_points(args.data)
    if labels is None:
        raise UsageError(f"{args.data} has no label column")
    name = args.name or Path(args.data).stem
    ds = Dataset(pts, labels, name)
    C, gamma, m = grid_search(
        ds, args.C_grid, args.gamma_grid, args.kernel, args.seed, args.alpha0, args.r0, _policy(args), args.split
    )
    report = {"set_name": name, "kernel_kind": args.kernel, "C": C, "gamma": gamma, "seed": args.seed,
              "C_grid": args.C_grid, "gamma_grid": args.gamma_grid, **m.to_dict()}
    if args.report:
        io.write_json(args.report, report)
    print(f"best C={C} gamma={gamma}: accuracy {m.accuracy:.4f}")
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kerrkernel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-data", help="uniform points on the unit square")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("sample-displacements", help="random (mu, nu) displacement pairs")
    p.add_argument("--sigma", type=float, default=0.5, help="variance of each quadrature component")
    p.add_argument("--count", type=int, default=4)
    p.add_argument("--max-abs2", type=float, default=3.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample_displacements)

    p = sub.add_parser("label", help="label points by the sign of the displaced parity")
    p.add_argument("--data", required=True)
    p.add_argument("--set", help="bundled set name (munu1..munu4) or a name inside --displacements")
    p.add_argument("--displacements", help="JSON file of displacement pairs")
    _add_physics(p)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="write label counts as JSON")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("train", help="train and evaluate a kernel SVM")
    p.add_argument("--config", help="JSON config (or a report with an embedded config) supplying defaults")
    p.add_argument("--data")
    p.add_argument("--name", help="set name recorded in the report")
    p.add_argument("--kernel", choices=KERNEL_KINDS, default="kerr-coherent-2mode")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--gamma", type=_gamma, default="scale")
    p.add_argument("--split", type=_split, default=0.7, help="training fraction")
    p.add_argument("--seed", type=int)
    _add_physics(p)
    p.add_argument("--report", required=True)
    p.add_argument("--model", help="save the trained model as JSON")
    p.add_argument("--mesh", help="write predicted labels on a unit-square mesh")
    p.add_argument("--mesh-step", type=float, default=0.02)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label points with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("wigner", help="decision function on a phase-space grid")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--x2", type=float, help="second coordinate (two-mode encoding)")
    p.add_argument("--nu", type=_complex, default=0j, help="fixed second-mode displacement for two-mode slices")
    p.add_argument("--gamma", type=float, default=0.0, help="loss rate (one-mode only)")
    p.add_argument("--chi", type=float, default=1.0)
    p.add_argument("--re-min", type=float, default=-2.5)
    p.add_argument("--re-max", type=float, default=2.5)
    p.add_argument("--im-min", type=float, default=-2.5)
    p.add_argument("--im-max", type=float, default=2.5)
    p.add_argument("--steps", type=int, default=51)
    _add_physics(p, ANALYTIC_POLICY.cutoff, ANALYTIC_POLICY.tail_tol)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("sequential", help="sequential parity-feedback learning of mu")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--label", type=int, choices=(-1, 1), required=True)
    p.add_argument("--mu0", type=_complex, default=0j)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--gradient-mode", choices=("empirical-fd", "analytic", "exact"), default="empirical-fd")
    p.add_argument("--seed", type=int, required=True)
    _add_physics(p, ANALYTIC_POLICY.cutoff, ANALYTIC_POLICY.tail_tol)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sequential)

    p = sub.add_parser("kernel", help="exact or shot-sampled Gram matrix")
    p.add_argument("--points", required=True)
    p.add_argument("--kind", choices=KERNEL_KINDS, default="kerr-coherent-2mode")
    p.add_argument("--gamma", type=_gamma, default="scale")
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    _add_physics(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("loss-sweep", help="real-axis decision cross-sections under photon loss")
    p.add_argument("--x", type=float, default=0.25)
    p.add_argument("--gammas", type=_floats, default=[0.0, 0.05, 0.1, 0.2], help="loss rates in units of chi")
    p.add_argument("--chi", type=float, default=1.0)
    p.add_argument("--re-min", type=float, default=-2.5)
    p.add_argument("--re-max", type=float, default=2.5)
    p.add_argument("--steps", type=int, default=201)
    _add_physics(p, ANALYTIC_POLICY.cutoff, ANALYTIC_POLICY.tail_tol)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_loss_sweep)

    p = sub.add_parser("grid-search", help="exhaustive (C, gamma) search on a fixed split")
    p.add_argument("--data", required=True)
    p.add_argument("--name")
    p.add_argument("--kernel", choices=KERNEL_KINDS, default="rbf")
    p.add_argument("--C-grid", type=_floats, default=[1.0, 10.0, 100.0, 1000.0])
    p.add_argument("--gamma-grid", type=lambda s: [_gamma(v) for v in s.split(",")], default=["scale"])
    p.add_argument("--split", type=_split, default=0.7)
    p.add_argument("--seed", type=int, required=True)
    _add_physics(p)
    p.add_argument("--report")
    p.set_defaults(func=cmd_grid_search)
    return parser


_CONFIG_KEYS = {"seed", "alpha0", "r0", "cutoff", "tail_tol", "C", "gamma", "split", "data"}


def _apply_config(parser, argv) -> None:
    """Let ``train --config FILE`` supply defaults that explicit flags override."""
    if not argv or argv[0] != "train" or "--config" not in argv:
        return
    k = argv.index("--config")
    if k + 1 >= len(argv):
        return
    raw = io.read_json(argv[k + 1])
    cfg = raw.get("config", raw)
    defaults = {key: cfg[key] for key in _CONFIG_KEYS if key in cfg}
    if "kernel" in cfg:
        defaults["kernel"] = cfg["kernel"]
    if "set_name" in cfg:
        defaults["name"] = cfg["set_name"]
    train = parser._subparsers._group_actions[0].choices["train"]
    train.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        if args.command == "train":
            if args.data is None:
                raise UsageError("--data is required (directly or via --config)")
            if args.seed is None:
                raise UsageError("--seed is required (directly or via --config)")
        return args.func(args)
    except (UsageError, DomainError, ShapeMismatchError, OSError) as exc:
        print(f"kerrkernel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalInconsistencyError, TruncationError, CutoffExceededError, FloatingPointError) as exc:
        print(f"kerrkernel: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except KerrKernelError as exc:
        print(f"kerrkernel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
