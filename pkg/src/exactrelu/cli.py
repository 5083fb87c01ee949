"""Command-line interface.

Every command is deterministic given its input files and ``--seed``.  With
``--report PATH`` a JSON run report is written that records the command, the
sha256 digests of its inputs, the seed, the wall time and a command-specific
outcome payload.

Exit codes: 0 success, 2 a decision came out false, 3 refused over budget,
1 any other error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import generate as gen
from .core import KReluNet, max_error, squared_loss, zero_loss_decision
from .exact import BudgetExceeded, TrainConfig, train_exact
from .geometry import enumerate_dichotomies
from .interp import ProjectionTieError, fit_overparam, verify_interpolation
from .io import (
    file_digest,
    instance_from_dict,
    instance_to_dict,
    net_from_dict,
    net_to_dict,
    read_dataset_csv,
    read_json,
    witness_from_dict,
    witness_to_dict,
    write_dataset_csv,
    write_json,
)
from .reduce import (
    check_hard_sort,
    check_separability,
    exhaustive_separability,
    extract_separability_witness,
    reduce_instance,
)

EXIT_OK, EXIT_ERROR, EXIT_FALSE, EXIT_BUDGET = 0, 1, 2, 3
EXHAUSTIVE_MAX_N = 10


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    seed: int = 0
    wall_time: float = 0.0
    outcome: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


class _Run:
    """Collects the report while a command runs."""

    def __init__(self, args):
        self.args = args
        self.report = RunReport(args.command, seed=args.seed)
        self.start = time.perf_counter()

    def input(self, path) -> Path:
        p = Path(path)
        self.report.inputs[str(path)] = file_digest(p)
        return p

    def say(self, text: str):
        if not self.args.quiet:
            print(text)

    def finish(self, code: int) -> int:
        self.report.wall_time = time.perf_counter() - self.start
        self.report.outcome["exit_code"] = code
        if self.args.report:
            write_json(self.args.report, self.report.to_dict())
        return code


def _tol(args, default: float) -> float:
    return default if args.tol is None else args.tol


# ---------------------------------------------------------------- commands

def cmd_generate(args, run: _Run) -> int:
    rng = np.random.default_rng(args.seed)
    out = Path(args.out)
    kind = args.kind
    res: dict = {"kind": kind, "out": str(out)}
    if kind == "gadget-only":
        ds = gen.gadget_only()
        write_dataset_csv(out, ds)
        res["N"] = ds.N
    elif kind in ("random-labels", "planted-net"):
        if kind == "random-labels":
            ds = gen.random_labels(args.n, args.d, rng)
        else:
            ds, net = gen.planted_net(args.n, args.d, rng)
            if args.net_out:
                write_json(args.net_out, net_to_dict(net))
        write_dataset_csv(out, ds)
        res["N"] = ds.N
    elif kind == "separable":
        inst, w = gen.separable_instance(args.n, args.d, rng)
        write_json(out, instance_to_dict(inst))
        if args.witness_out:
            write_json(args.witness_out, witness_to_dict(w))
        res.update(N=inst.N, S1=len(inst.S1), witness_valid=check_separability(inst, w))
    elif kind == "unseparable":
        inst = gen.unseparable_instance(args.n, args.d, rng)
        write_json(out, instance_to_dict(inst))
        res.update(N=inst.N, S1=len(inst.S1))
    else:  # argparse restricts choices
        raise ValueError(kind)
    run.report.outcome.update(res)
    run.say(f"wrote {kind} to {out}")
    return EXIT_OK


def cmd_reduce(args, run: _Run) -> int:
    inst = instance_from_dict(read_json(run.input(args.instance)))
    norm, ds = reduce_instance(inst)
    write_dataset_csv(args.out, ds)
    run.report.outcome.update(N=ds.N, d=ds.d, shift=norm.shift.tolist())
    run.say(f"reduced instance: {ds.N} points in R^{ds.d} -> {args.out}")
    return EXIT_OK


def _config(args, decision: bool) -> TrainConfig:
    return TrainConfig(
        tol=_tol(args, 1e-8),
        decision=decision,
        budget=args.budget,
        strategy=args.strategy,
        order=args.order,
        threads=args.threads,
        refine_theta=not decision,
    )


def cmd_train_exact(args, run: _Run) -> int:
    ds = read_dataset_csv(run.input(args.dataset), header=args.header)
    res = train_exact(ds, _config(args, args.decision))
    if args.out:
        write_json(args.out, net_to_dict(res.net))
    out = {
        "loss": res.loss,
        "refined_loss": res.refined_loss,
        "subproblems_solved": res.subproblems_solved,
        "certificate": res.certificate,
        "decision": res.decision,
        "stats": res.stats,
    }
    run.report.outcome.update(out)
    run.say(f"loss {res.loss:.6g} after {res.subproblems_solved} subproblems (certificate {res.certificate})")
    if args.decision:
        run.say(f"decision: {res.decision}")
        return EXIT_OK if res.decision else EXIT_FALSE
    return EXIT_OK


def cmd_fit_nrelu(args, run: _Run) -> int:
    ds = read_dataset_csv(run.input(args.dataset), header=args.header)
    net = fit_overparam(ds, seed=args.seed)
    if args.out:
        write_json(args.out, net_to_dict(net))
    err = max_error(net, ds)
    run.report.outcome.update(nodes=len(net), max_error=err, w0=net.w0, theta=net.theta)
    run.say(f"{len(net)} hidden units, max error {err:.3g}")
    return EXIT_OK


def cmd_check_hardsort(args, run: _Run) -> int:
    ds = read_dataset_csv(run.input(args.dataset), header=args.header)
    w = witness_from_dict(read_json(run.input(args.witness)))
    ok = check_hard_sort(ds.X, ds.S1, w, tol=_tol(args, 1e-9))
    run.report.outcome.update(valid=ok)
    run.say(f"hard-sort witness valid: {ok}")
    return EXIT_OK if ok else EXIT_FALSE


def cmd_extract_witness(args, run: _Run) -> int:
    net = net_from_dict(read_json(run.input(args.net)))
    inst = instance_from_dict(read_json(run.input(args.instance)))
    w = extract_separability_witness(net, inst, tol=_tol(args, 1e-8))
    ok = check_separability(inst, w)
    if args.out:
        write_json(args.out, witness_to_dict(w))
    run.report.outcome.update(valid=ok, witness=witness_to_dict(w))
    run.say(f"extracted witness valid: {ok}")
    return EXIT_OK if ok else EXIT_FALSE


def cmd_enum_dichotomies(args, run: _Run) -> int:
    ds = read_dataset_csv(run.input(args.dataset), header=args.header)
    dich = enumerate_dichotomies(ds.X)
    run.report.outcome.update(count=len(dich), N=ds.N, d=ds.d)
    run.say(f"{len(dich)} dichotomies")
    if args.signs:
        for dc in dich:
            print(",".join("+" if s > 0 else "-" for s in dc.signs))
    return EXIT_OK


def cmd_pipeline(args, run: _Run) -> int:
    inst = instance_from_dict(read_json(run.input(args.instance)))
    norm, ds = reduce_instance(inst)
    res = train_exact(ds, _config(args, True))
    out: dict = {
        "N": inst.N,
        "d": inst.d,
        "decision": bool(res.decision),
        "subproblems_solved": res.subproblems_solved,
    }
    valid = False
    if res.decision:
        w = extract_separability_witness(res.net, inst, tol=_tol(args, 1e-8))
        valid = check_separability(inst, w)
        out["witness"] = witness_to_dict(w)
        if args.out:
            write_json(args.out, net_to_dict(res.net))
    out["witness_valid"] = valid
    if inst.N <= EXHAUSTIVE_MAX_N and not args.no_exhaustive:
        out["exhaustive_separable"] = exhaustive_separability(inst) is not None
        flags = {out["decision"], valid, out["exhaustive_separable"]}
    else:
        out["exhaustive_separable"] = None
        flags = {out["decision"], valid}
    out["agree"] = len(flags) == 1
    run.report.outcome.update(out)
    run.say(
        f"decision {out['decision']}, witness valid {valid}, "
        f"exhaustive {out['exhaustive_separable']}, agree {out['agree']}"
    )
    if not out["agree"]:
        return EXIT_ERROR
    return EXIT_OK if out["decision"] else EXIT_FALSE


def cmd_verify(args, run: _Run) -> int:
    net = net_from_dict(read_json(run.input(args.net)))
    ds = read_dataset_csv(run.input(args.dataset), header=args.header)
    tol = _tol(args, 1e-9)
    if isinstance(net, KReluNet):
        ok = verify_interpolation(net, ds, tol)
        run.report.outcome["nodes"] = len(net)
    else:
        ok = zero_loss_decision(net, ds, tol)
    run.report.outcome.update(valid=ok, max_error=max_error(net, ds), loss=squared_loss(net, ds))
    run.say(f"interpolates within {tol:g}: {ok}")
    return EXIT_OK if ok else EXIT_FALSE


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    def common(suppress: bool) -> argparse.ArgumentParser:
        # options are accepted before or after the command; the copy on each
        # command uses SUPPRESS so it does not overwrite an earlier value
        def dflt(v):
            return argparse.SUPPRESS if suppress else v

        c = argparse.ArgumentParser(add_help=False)
        c.add_argument("--seed", type=int, default=dflt(0), help="seed for all randomness (default 0)")
        c.add_argument("--tol", type=float, default=dflt(None), help="numeric tolerance (command-specific default)")
        c.add_argument("--threads", type=int, default=dflt(1), help="worker threads for exact training")
        c.add_argument("--report", default=dflt(None), help="write a JSON run report here")
        c.add_argument("--quiet", action="store_true", default=dflt(False), help="suppress progress output")
        return c

    p = argparse.ArgumentParser(prog="exactrelu", description=__doc__.split("\n")[0], parents=[common(False)])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, parents=[common(True)])
        sp.set_defaults(func=func)
        return sp

    def header_flag(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--header", dest="header", action="store_true", default=None,
                       help="the CSV has a header row")
        g.add_argument("--no-header", dest="header", action="store_false",
                       help="the CSV has no header row")

    def train_flags(sp):
        sp.add_argument("--budget", type=int, default=10**7, help="maximum number of subproblems")
        sp.add_argument("--strategy", choices=("branch", "enumerate"), default="branch")
        sp.add_argument("--order", choices=("input", "reverse", "spread", "random"), default="input",
                        help="point order for the branch strategy")

    sp = add("generate", cmd_generate, "write a random instance or dataset")
    sp.add_argument("--kind", choices=gen.KINDS, required=True)
    sp.add_argument("--n", type=int, default=10, help="number of points")
    sp.add_argument("--d", type=int, default=2, help="input dimension")
    sp.add_argument("--out", required=True)
    sp.add_argument("--witness-out", default=None, help="separable: also write the planted witness")
    sp.add_argument("--net-out", default=None, help="planted-net: also write the planted network")

    sp = add("reduce", cmd_reduce, "build the gadget dataset of a separability instance")
    sp.add_argument("instance")
    sp.add_argument("--out", required=True)

    sp = add("train-exact", cmd_train_exact, "globally optimal two-unit training")
    sp.add_argument("dataset")
    header_flag(sp)
    sp.add_argument("--decision", action="store_true", help="only decide whether zero loss is reachable")
    sp.add_argument("--out", default=None, help="write the network as JSON")
    train_flags(sp)

    sp = add("fit-nrelu", cmd_fit_nrelu, "interpolate 0/1 labels with at most N units")
    sp.add_argument("dataset")
    header_flag(sp)
    sp.add_argument("--out", default=None)

    sp = add("check-hardsort", cmd_check_hardsort, "check a hard-sorting witness on a dataset")
    sp.add_argument("dataset")
    sp.add_argument("witness")
    header_flag(sp)

    sp = add("extract-witness", cmd_extract_witness, "read two separating planes off a zero-loss network")
    sp.add_argument("net")
    sp.add_argument("instance")
    sp.add_argument("--out", default=None)

    sp = add("enum-dichotomies", cmd_enum_dichotomies, "count hyperplane dichotomies of a dataset")
    sp.add_argument("dataset")
    header_flag(sp)
    sp.add_argument("--signs", action="store_true", help="print the sign matrix as CSV")

    sp = add("pipeline", cmd_pipeline, "reduce, decide, extract and cross-check one instance")
    sp.add_argument("instance")
    sp.add_argument("--out", default=None, help="write the zero-loss network found")
    sp.add_argument("--no-exhaustive", action="store_true", help="skip the exhaustive ground truth")
    train_flags(sp)

    sp = add("verify", cmd_verify, "check that a network fits a dataset")
    sp.add_argument("net")
    sp.add_argument("dataset")
    header_flag(sp)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    run = _Run(args)
    try:
        code = args.func(args, run)
    except BudgetExceeded as exc:
        run.report.outcome["error"] = str(exc)
        print(f"refused: {exc}", file=sys.stderr)
        return run.finish(EXIT_BUDGET)
    except (ValueError, OSError, KeyError, ProjectionTieError, RuntimeError) as exc:
        run.report.outcome["error"] = f"{type(exc).__name__}: {exc}"
        print(f"error: {exc}", file=sys.stderr)
        return run.finish(EXIT_ERROR)
    return run.finish(code)


if __name__ == "__main__":
    sys.exit(main())
