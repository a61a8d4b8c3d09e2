"""Command-line entry point: ``polwishart <subcommand> [flags]``.

Every run prints its resolved configuration as JSON on standard error.
Artifacts are written to a temporary file first and renamed into place, so
a zero exit code means the output is complete.
"""

import argparse
import contextlib
import json
import os
import sys

import numpy as np

from . import formats
from . import hermitian as hm
from .clustering import aligned_accuracy, kmeans, synth_image
from .distances import Case, Kind, Measure, distance, resolve_case
from .errors import PolWishartError
from .hypothesis import DfMode, two_sample_test
from .montecarlo import (
    DEFAULT_MEASURES, ExperimentConfig, Looks, SensitivityRow, SigmaEntry,
    empirical_power, empirical_size, power_config, sensitivity_curve, write_csv,
)
from .sampler import sample_wishart_relaxed, seeded_rng
from .wishart import fit

KINDS = [k.value for k in Kind]
LOG_MEASURES = ("kl", "renyi:0.9", "bhattacharyya", "hellinger")


class UsageError(Exception):
    pass


def _eprint(*args):
    print(*args, file=sys.stderr)


@contextlib.contextmanager
def _staged(path):
    """Yield a temporary path that replaces ``path`` only on success."""
    tmp = f"{path}.part"
    try:
        yield tmp
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with _staged(out) as tmp, open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} requires {', '.join(missing)}")


def _measure(args):
    return Measure.parse(args.measure, args.beta)


def _grid(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# -- subcommands ------------------------------------------------------------

def cmd_fit(args):
    sample = formats.read_samples(args.samples)
    theta = fit(sample)
    logdet = float(hm.logdet(theta.sigma))
    _eprint(json.dumps({"n_hat": theta.n, "logdet_sigma_hat": logdet, "N": sample.N}))
    doc = formats.params_to_document(theta)
    doc.update({"N": sample.N, "logdet_sigma": logdet})
    _emit(json.dumps(doc, indent=2) + "\n", args.out)


def cmd_sample(args):
    _need(args, "params", "count", "seed", "out")
    if args.count < 1:
        raise UsageError("--count must be positive")
    theta = formats.read_params(args.params)
    z = sample_wishart_relaxed(theta, seeded_rng(args.seed), size=args.count)
    with _staged(args.out) as tmp:
        formats.write_samples(tmp, z)


def cmd_distance(args):
    _need(args, "a", "b")
    t1, t2 = formats.read_params(args.a), formats.read_params(args.b)
    measure = _measure(args)
    case = Case.parse(args.case)
    used = resolve_case(t1, t2, case) if measure.kind not in (Kind.BARTLETT, Kind.REVISED_WISHART) else None
    value = distance(measure, t1, t2, case)
    doc = {"measure": measure.label, "value": value, "case": used.value if used else None}
    resolved = Case.AUTO if used is None else used
    values = [distance(m, t1, t2, resolved) for m in LOG_MEASURES]
    ordered = values[0] > values[1] >= values[2] >= values[3]
    _eprint(json.dumps({"ordering": dict(zip(LOG_MEASURES, values)), "kl>renyi>=b>=h": ordered}))
    _emit(json.dumps(doc) + "\n", args.out)


def cmd_test(args):
    _need(args, "a", "b")
    s1, s2 = formats.read_samples(args.a), formats.read_samples(args.b)
    result = two_sample_test(s1, s2, _measure(args), args.level, DfMode.parse(args.df))
    _emit(json.dumps(result.to_dict(), indent=2) + "\n", args.out)


def _experiment_config(args, factory):
    doc = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
    doc["seed"] = args.seed
    if args.replicas is not None:
        doc["replicas"] = args.replicas
    try:
        base = factory()
        return ExperimentConfig.from_document(doc, **{k: v for k, v in vars(base).items() if k not in doc})
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def _csv_out(rows, out, row_type):
    if out in (None, "-"):
        write_csv(rows, sys.stdout, row_type)
    else:
        with _staged(out) as tmp:
            write_csv(rows, tmp, row_type)


def cmd_size(args):
    _need(args, "seed")
    cfg = _experiment_config(args, ExperimentConfig)
    _eprint(json.dumps({"experiment": cfg.to_document()}))
    rows = empirical_size(cfg, workers=args.threads)
    _csv_out(rows, args.out, type(rows[0]))


def cmd_power(args):
    _need(args, "seed")
    cfg = _experiment_config(args, power_config)
    _eprint(json.dumps({"experiment": cfg.to_document()}))
    rows = empirical_power(cfg, workers=args.threads)
    _csv_out(rows, args.out, type(rows[0]))


def cmd_sensitivity(args):
    _need(args, "params", "grid")
    fixed = formats.read_params(args.params)
    vary = Looks(args.grid) if args.vary == "looks" else SigmaEntry(args.grid, args.index)
    rows = sensitivity_curve(fixed, vary, N=args.N, measures=args.measures.split(","))
    _csv_out(rows, args.out, SensitivityRow)


def _write_labels(prefix, labels, binary):
    with _staged(prefix + ".pgm") as tmp:
        formats.write_pgm(tmp, labels, binary=binary)
    with _staged(prefix + ".csv") as tmp:
        formats.write_label_csv(tmp, labels)


def cmd_cluster(args):
    _need(args, "image", "k", "seed", "out")
    img = formats.read_image(args.image)
    state = kmeans(img, args.k, _measure(args), seed=args.seed, max_iter=args.max_iter, restarts=args.restarts)
    summary = {
        "iterations": state.iteration,
        "converged": state.converged,
        "objective": state.objective,
        "restart": state.restart,
        "empty_clusters": np.flatnonzero(state.empty).tolist(),
    }
    if args.truth:
        summary["aligned_accuracy"] = aligned_accuracy(state.labels, _read_labels(args.truth), args.k)
    _eprint(json.dumps(summary))
    _write_labels(args.out, state.labels, args.binary)


def _read_labels(path):
    return formats.read_label_csv(path) if path.lower().endswith(".csv") else formats.read_pgm(path)


def cmd_synth(args):
    _need(args, "seed", "out")
    img, truth = synth_image(args.seed)
    with _staged(args.out) as tmp:
        formats.write_image_pwif(tmp, img)
    _write_labels(args.truth or os.path.splitext(args.out)[0] + ".truth", truth, args.binary)


def cmd_convert(args):
    _need(args, "input", "out")
    kind = args.kind
    if kind == "auto":
        kind = "image" if formats.is_pwif(args.input) else _sniff_text(args.input)
    to = args.to
    if to == "auto":
        to = "pwif" if args.out.lower().endswith(".pwif") else "text"
    with _staged(args.out) as tmp:
        if kind == "image":
            img = formats.read_image(args.input)
            (formats.write_image_pwif if to == "pwif" else formats.write_image_text)(tmp, img)
        elif to == "pwif":
            raise UsageError("only images have a PWIF form")
        elif kind == "samples":
            formats.write_samples(tmp, formats.read_samples(args.input))
        elif kind == "params":
            formats.write_params(tmp, formats.read_params(args.input))
        else:
            with open(args.input, encoding="utf-8") as fh:
                m = hm.from_document(json.load(fh))
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(json.dumps(hm.to_document(m)) + "\n")


def _sniff_text(path):
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        rest = fh.read(1)
    if not first.strip():
        raise formats.FormatError(f"{path}: line 1: empty file")
    try:
        head = json.loads(first)
    except json.JSONDecodeError:
        head = None
        if not rest:
            raise formats.FormatError(f"{path}: line 1: invalid JSON") from None
    if isinstance(head, dict):
        if "height" in head and "width" in head:
            return "image"
        if "N" in head and "re" not in head:
            return "samples"
        if "re" in head:
            return "matrix"
    return "params"


# -- parser -----------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed (required by randomized commands)")
    common.add_argument("--threads", type=int, default=1, help="worker processes for Monte Carlo")
    common.add_argument("--out", help="output path ('-' or omitted: standard output where possible)")

    parser = argparse.ArgumentParser(
        prog="polwishart",
        description="Stochastic distances, tests and clustering for relaxed complex Wishart data.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(func=func)
        return p

    def measure_flags(p, required=True):
        p.add_argument("--measure", required=required, default=None if required else "kl", help="|".join(KINDS) + " or renyi:B")
        p.add_argument("--beta", type=float, help="Renyi order in (0, 1)")

    p = add("fit", cmd_fit, "ML fit of (Sigma, n) to a sample-set file")
    p.add_argument("samples", help="sample-set file")

    p = add("sample", cmd_sample, "draw matrices from W_R(Sigma, n)")
    p.add_argument("--params", help="parameter file")
    p.add_argument("--count", type=int)

    p = add("distance", cmd_distance, "distance between two parameter files")
    measure_flags(p)
    p.add_argument("--a", help="first parameter file")
    p.add_argument("--b", help="second parameter file")
    p.add_argument("--case", default="auto", choices=[c.value for c in Case])

    p = add("test", cmd_test, "two-sample test between sample-set files")
    measure_flags(p)
    p.add_argument("--a", help="first sample-set file")
    p.add_argument("--b", help="second sample-set file")
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--df", default="full", choices=[d.value for d in DfMode])

    for name, func, text in (
        ("size-experiment", cmd_size, "Monte Carlo size study; CSV output"),
        ("power-experiment", cmd_power, "Monte Carlo power study; CSV output"),
    ):
        p = add(name, func, text)
        p.add_argument("--config", help="JSON experiment document (fields of ExperimentConfig)")
        p.add_argument("--replicas", type=int, help="override the number of replicas")

    p = add("sensitivity", cmd_sensitivity, "statistics along a parameter grid; CSV output")
    p.add_argument("--params", help="parameter file of the fixed law")
    p.add_argument("--vary", choices=["sigma-entry", "looks"], default="sigma-entry")
    p.add_argument("--index", type=int, default=0, help="diagonal entry varied by sigma-entry")
    p.add_argument("--grid", type=_grid, help="comma-separated values")
    p.add_argument("--N", type=int, default=100, help="sample size entering the statistic")
    p.add_argument("--measures", default=",".join(DEFAULT_MEASURES))

    p = add("cluster", cmd_cluster, "k-means clustering of an image; writes OUT.pgm and OUT.csv")
    measure_flags(p)
    p.add_argument("--image", help="PWIF or text image")
    p.add_argument("--k", type=int)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--truth", help="ground-truth label map (.pgm or .csv) for reporting accuracy")
    p.add_argument("--binary", action="store_true", help="write P5 instead of P2")

    p = add("synth-image", cmd_synth, "synthetic three-class image (PWIF) and its ground truth")
    p.add_argument("--truth", help="ground-truth prefix (default: OUT without extension + '.truth')")
    p.add_argument("--binary", action="store_true", help="write P5 instead of P2")

    p = add("convert", cmd_convert, "convert between text and PWIF forms")
    p.add_argument("--in", dest="input", help="source file")
    p.add_argument("--kind", default="auto", choices=["auto", "image", "samples", "params", "matrix"])
    p.add_argument("--to", default="auto", choices=["auto", "text", "pwif"])
    return parser


def _resolved(args):
    out = {k: v for k, v in vars(args).items() if k != "func"}
    return json.dumps({"config": out}, default=lambda v: list(v) if isinstance(v, tuple) else str(v))


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _eprint(_resolved(args))
    try:
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        args.func(args)
    except UsageError as exc:
        _eprint(f"polwishart {args.command}: error: {exc}")
        return 2
    except (PolWishartError, OSError, ValueError) as exc:
        _eprint(f"polwishart {args.command}: {type(exc).__name__}: {exc}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
