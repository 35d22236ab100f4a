"""Command line entry point: ``jackmix <subcommand> ...``.

Data go to ``--out`` (or ``$JACKMIX_OUT/<default name>`` when that is set,
else standard output); logs go to standard error.

Exit codes: 0 ok, 1 invariant failure, 2 bad arguments, 3 numeric instability.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction

from .partitions import Partition, format_partition, parse_partition

log = logging.getLogger("jackmix")

OUT_ENV = "JACKMIX_OUT"


class UsageError(Exception):
    pass


def rational(text: str) -> Fraction:
    try:
        val = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    return val


def positive_rational(text: str) -> Fraction:
    val = rational(text)
    if val <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return val


def partition_arg(text: str) -> Partition:
    try:
        return parse_partition(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fmt(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, Partition):
        return format_partition(x)
    if x is None:
        return ""
    return str(x)


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(type(x).__name__)


def _emit(args, text: str, default_name: str) -> None:
    path = args.out
    if path is None and os.environ.get(OUT_ENV):
        path = os.path.join(os.environ[OUT_ENV], default_name)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    log.info("wrote %s", path)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _start(text: str, n: int) -> Partition:
    if text == "id":
        return Partition((1,) * n)
    if text == "ncycle":
        return Partition((n,))
    lam = partition_arg(text)
    if sum(lam) != n:
        raise UsageError(f"start {text} is not a partition of {n}")
    return lam


# ----------------------------------------------------------- subcommands


def cmd_kernel(args) -> int:
    from .chain import build_kernel

    exact = args.mode != "float"
    k = build_kernel(args.n, args.theta, args.lazy, exact=exact)
    rows = ((format_partition(a), format_partition(b), p) for a, b, p in k.triplets())
    _emit(args, _csv(["from", "to", "prob"], rows), f"kernel_n{args.n}.csv")
    return 0


def cmd_jack(args) -> int:
    from .jack import d_coeff, jack_table

    t = jack_table(args.n, args.theta)
    if args.emit == "j":
        data = {format_partition(l): str(t.j[l]) for l in t.partitions}
    else:
        get = (lambda l, r: t.c[(l, r)]) if args.emit == "c" else (lambda l, r: d_coeff(l, r, t))
        data = {
            format_partition(l): {format_partition(r): str(get(l, r)) for r in t.partitions if get(l, r)}
            for l in t.partitions
        }
    obj = {"n": args.n, "theta": str(args.theta), "emit": args.emit,
           "order": [format_partition(l) for l in t.partitions], "data": data}
    _emit(args, _json(obj), f"jack_n{args.n}_{args.emit}.json")
    return 0


def _frange(a: float, b: float, step: float) -> list:
    if step <= 0:
        raise UsageError("--c-step must be positive")
    out, i = [], 0
    while True:
        c = round(a + i * step, 12)
        if c > b + 1e-12:
            return out
        out.append(c)
        i += 1


def cmd_tv_profile(args) -> int:
    from .experiments import cutoff_profile

    cs = _frange(args.c_from, args.c_to, args.c_step)
    start = args.start if args.start in ("id", "ncycle") else _start(args.start, args.n)
    rows = cutoff_profile(args.n, args.theta, cs, delta=args.lazy, start=start, mode=args.mode, K=args.K)
    header = ["c", "t", "tv", "l2_bound", "tv_lower", "tv_upper", "tv_method"]
    _emit(args, _csv(header, ([r[h] for h in header] for r in rows)), f"tv_profile_n{args.n}.csv")
    return 0


def cmd_sample(args) -> int:
    from .chain import default_laziness, replica_rng, sample_step

    n, theta = args.n, args.theta
    delta = default_laziness(n, theta) if args.lazy is None else args.lazy
    start = _start(args.start, n)
    # d_(n-1,1) = -1/theta + (1 + (n-1) theta) m_1 / (theta n)
    a0 = -1 / float(theta)
    a1 = (1 + (n - 1) * float(theta)) / (float(theta) * n)
    sums = [[0.0, 0.0, 0.0] for _ in range(args.steps + 1)]
    sq = [[0.0, 0.0, 0.0] for _ in range(args.steps + 1)]
    for r in range(args.reps):
        rng = replica_rng(args.seed, r)
        lam = start
        for s in range(args.steps + 1):
            if s:
                lam = sample_step(lam, theta, delta, rng)
            m1 = sum(1 for p in lam if p == 1)
            vals = (m1, len(lam), a0 + a1 * m1)
            for i, v in enumerate(vals):
                sums[s][i] += v
                sq[s][i] += v * v
    rows = []
    R = args.reps
    for s in range(args.steps + 1):
        mean = [x / R for x in sums[s]]
        var = [max(q / R - m * m, 0.0) for q, m in zip(sq[s], mean)]
        rows.append([s, mean[0], var[0], mean[1], var[1], mean[2], var[2]])
    header = ["step", "m1_mean", "m1_var", "length_mean", "length_var", "d_mean", "d_var"]
    _emit(args, _csv(header, rows), f"sample_n{n}.csv")
    return 0


def cmd_lower_bound(args) -> int:
    from .experiments import lower_bound_witness

    rep = lower_bound_witness(args.n, args.theta, args.c, args.reps, args.seed, delta=args.lazy)
    _emit(args, _json(rep), f"lower_bound_n{args.n}.json")
    return 0


def cmd_fk(args) -> int:
    from .experiments import ncycle_fk_experiment

    rep = ncycle_fk_experiment(args.n, args.k, args.t, args.reps, args.seed, theta=args.theta, delta=args.lazy)
    _emit(args, _json(rep), f"fk_n{args.n}.json")
    return 0


_OPS = {"dtheta2": "Dtheta2", "dtheta3": "Dtheta3", "d110": "D110", "d002": "D002",
        "d120": "D120", "d210": "D210", "d003": "D003", "lb2": "LB2"}


def cmd_ops(args) -> int:
    from .sdops import OperatorSpec, apply
    from .symfunc import from_json, to_json

    with open(args.input) as fh:
        f = from_json(fh.read())
    op = OperatorSpec(_OPS[args.op], args.theta, args.nvars)
    res = apply(op, f)
    _emit(args, to_json(res) + "\n", f"ops_{args.op}.json")
    return 0


def cmd_verify(args) -> int:
    from .verify import deviations, run_suite

    failed = 0
    for name, fails in run_suite(quick=args.quick):
        status = "ok" if not fails else f"FAIL ({len(fails)})"
        print(f"{name}: {status}")
        for msg in fails[:10]:
            print(f"  {msg}")
        failed += bool(fails)
    print("reference-formula deviations (informational):")
    for d in deviations():
        print(f"  {d}")
    return 1 if failed else 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jackmix", description="Metropolis random transpositions and Jack polynomials")
    p.add_argument("--log-level", default="WARNING", help="logging level for stderr")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="thread cap for numeric libraries")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, lazy=True, out=True):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--theta", type=positive_rational, required=True)
        if lazy:
            sp.add_argument("--lazy", type=rational, default=None, help="holding probability p/q")
        if out:
            sp.add_argument("--out", default=None)

    s = sub.add_parser("kernel", help="transition triplets as CSV")
    common(s)
    s.add_argument("--mode", choices=("exact", "float", "auto"), default="exact")
    s.set_defaults(fn=cmd_kernel)

    s = sub.add_parser("jack", help="Jack coefficient tables as JSON")
    common(s, lazy=False)
    s.add_argument("--emit", choices=("c", "d", "j"), default="c")
    s.set_defaults(fn=cmd_jack)

    s = sub.add_parser("tv-profile", help="cutoff profile CSV")
    common(s)
    s.add_argument("--start", default="id")
    s.add_argument("--c-from", type=float, default=-6.0)
    s.add_argument("--c-to", type=float, default=6.0)
    s.add_argument("--c-step", type=float, default=0.5)
    s.add_argument("--mode", choices=("exact", "float", "auto"), default="auto")
    s.add_argument("--K", type=int, default=40, help="spectral truncation depth n - lambda_1 <= K")
    s.set_defaults(fn=cmd_tv_profile)

    s = sub.add_parser("sample", help="simulate the chain, per-step summaries")
    common(s)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--reps", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--start", default="id")
    s.set_defaults(fn=cmd_sample)

    s = sub.add_parser("lower-bound", help="second-moment witness experiment")
    common(s)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--reps", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(fn=cmd_lower_bound)

    s = sub.add_parser("fk", help="n-cycle short-cycle statistic experiment")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--theta", type=positive_rational, default=Fraction(1))
    s.add_argument("--lazy", type=rational, default=None)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--reps", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(fn=cmd_fk)

    s = sub.add_parser("ops", help="apply a differential operator to a power-sum expansion")
    s.add_argument("--op", choices=sorted(_OPS), required=True)
    s.add_argument("--theta", type=positive_rational, default=Fraction(1))
    s.add_argument("--nvars", type=int, required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(fn=cmd_ops)

    s = sub.add_parser("verify", help="run the exact invariant suite")
    s.add_argument("--quick", action="store_true", help="cap ranges at n <= 6")
    s.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(max(1, args.threads)))
    from .spectral import NumericInstability

    try:
        return args.fn(args)
    except NumericInstability as exc:
        log.error("numeric instability: %s", exc)
        return 3
    except (UsageError, ValueError, OSError) as exc:
        log.error("%s", exc)
        print(f"jackmix: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
