"""Command-line interface.

Every analysis command prints one JSON report envelope on stdout::

    {"command": ..., "status": "ok" | "negative" | "input-error",
     "inputs": {role: {"path": ..., "sha256": ...}}, "verdict": ...}

Exit codes: 0 affirmative, 1 well-formed negative, 2 input error.
``minors``, ``apply`` and ``generate`` emit the file they produce instead
(to stdout, or to ``--output``).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .clans import find_nontrivial_clan, hl_indecomposable, is_separable
from .errors import (
    DensityError,
    FieldError,
    HypothesisError,
    InconsistencyError,
    PreconditionError,
    SkewMinorError,
    VerificationError,
)
from .exactfield import QQ, FieldSpec
from .minors import hl_equivalent, is_principally_unimodular, load_minor_table, principal_minors, wesp_check
from .skewmat import (
    LabeledMatrix,
    apply_witness,
    flip_on_set,
    gen_random_dense,
    gen_skew_cycle,
    gen_sym_cycle,
    is_irreducible,
    load_matrix,
)
from .witness import load_witness, reconstruct_from_minors, recover_witness

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


class _Run:
    def __init__(self, command: str, quiet: bool):
        self.command = command
        self.quiet = quiet
        self.inputs: dict[str, dict] = {}

    def note(self, msg: str):
        if not self.quiet:
            print(f"skewminor {self.command}: {msg}", file=sys.stderr)

    def digest(self, role: str, path: str):
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        self.inputs[role] = {"path": path, "sha256": hashlib.sha256(data).hexdigest()}

    def matrix(self, role: str, path: str) -> LabeledMatrix:
        self.digest(role, path)
        try:
            return load_matrix(path)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc.msg})") from None
        except (SkewMinorError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}: {exc}") from None

    def report(self, status: str, verdict=None, message: str | None = None) -> int:
        env: dict = {"command": self.command, "status": status, "inputs": self.inputs}
        if status == "input-error":
            env["message"] = message
        else:
            env["verdict"] = verdict
        print(json.dumps(env, indent=2, ensure_ascii=False))
        if message:
            self.note(message)
        return {"ok": EXIT_OK, "negative": EXIT_NEGATIVE}.get(status, EXIT_INPUT)


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _field(args) -> FieldSpec:
    if getattr(args, "p", None) is not None:
        return FieldSpec.prime(args.p)
    if getattr(args, "field", None):
        return FieldSpec.from_text(args.field)
    return QQ


# -- commands ------------------------------------------------------------------


def cmd_analyze(args, run: _Run) -> int:
    A = run.matrix("matrix", args.matrix)
    density = A.density()
    skew = A.is_skew()
    verdict = {
        "order": A.n,
        "skew": skew,
        "symmetric": A.is_symmetric(),
        "dense": density.dense,
        "zero_pair": list(density.zero_pair) if density.zero_pair else None,
        "irreducible": is_irreducible(A),
        "separability": is_separable(A).to_json() if skew else None,
        "clan": find_nontrivial_clan(A).to_json() if A.n >= 2 else None,
        "hl": hl_indecomposable(A).to_json(),
    }
    return run.report("ok", verdict)


def cmd_compare(args, run: _Run) -> int:
    A = run.matrix("A", args.a)
    B = run.matrix("B", args.b)
    if A.labels != B.labels or A.spec != B.spec:
        raise InputError("matrices differ in labels or field")
    k = A.n if args.order is None else args.order
    if not 0 <= k <= A.n:
        raise InputError(f"--order must lie in 0..{A.n}")
    verdict = hl_equivalent(A, B, k, full=args.full)
    return run.report("ok" if verdict.equivalent else "negative", verdict.to_json())


def cmd_witness(args, run: _Run) -> int:
    A = run.matrix("A", args.a)
    B = run.matrix("B", args.b)
    if A.labels != B.labels or A.spec != B.spec:
        raise InputError("matrices differ in labels or field")
    if not (A.is_skew() and B.is_skew()):
        raise InputError("both matrices must be skew-symmetric")
    try:
        W = recover_witness(A, B, verify_input=args.verify_input)
    except HypothesisError as exc:
        cert = {"failure": "hypothesis", "message": str(exc)}
        if exc.subset is not None:
            cert["hl_clan"] = list(exc.subset)
        if exc.pair is not None:
            cert["pair"] = list(exc.pair)
        return run.report("negative", cert)
    except VerificationError as exc:
        return run.report("negative", {"failure": "verification", "message": str(exc),
                                       "counterexample": list(exc.entry)})
    except PreconditionError as exc:
        cert = {"failure": "density" if isinstance(exc, DensityError) else "precondition",
                "message": str(exc)}
        if exc.pair is not None:
            cert["pair"] = list(exc.pair)
        if exc.subset is not None:
            cert["subset"] = list(exc.subset)
        return run.report("negative", cert)
    return run.report("ok", W.to_json())


def cmd_apply(args, run: _Run) -> int:
    A = run.matrix("matrix", args.matrix)
    run.digest("witness", args.witness)
    try:
        W = load_witness(args.witness)
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.witness}: invalid JSON ({exc.msg})") from None
    _emit(apply_witness(A, W).dumps(), args.output)
    return EXIT_OK


def cmd_minors(args, run: _Run) -> int:
    A = run.matrix("matrix", args.matrix)
    k = A.n if args.order is None else args.order
    if not 0 <= k <= A.n:
        raise InputError(f"--order must lie in 0..{A.n}")
    _emit(principal_minors(A, k).dumps(), args.output)
    return EXIT_OK


def cmd_reconstruct(args, run: _Run) -> int:
    spec = _field(args)
    run.digest("minors", args.minors)
    try:
        T = load_minor_table(args.minors, spec)
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.minors}: invalid JSON ({exc.msg})") from None
    except (KeyError, TypeError) as exc:
        raise InputError(f"{args.minors}: malformed minor table ({exc})") from None
    if T.max_order < 4:
        raise InputError("reconstruction needs max_order >= 4")
    try:
        reps = reconstruct_from_minors(T, spec, limit=args.limit)
    except (InconsistencyError, FieldError, DensityError) as exc:
        kind = {InconsistencyError: "inconsistent", FieldError: "non-square", DensityError: "not-dense"}[type(exc)]
        return run.report("negative", {"failure": kind, "message": str(exc),
                                       "subset": list(exc.subset) if exc.subset is not None else None})
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, R in enumerate(reps, 1):
            (out / f"representative_{i}.json").write_text(R.dumps(), encoding="utf-8")
    return run.report("ok", {"count": len(reps), "representatives": [R.to_json() for R in reps]})


def cmd_generate(args, run: _Run) -> int:
    fam = args.family
    if fam in ("skew-cycle", "sym-cycle", "random-dense") and args.n is None:
        raise InputError(f"{fam} needs --n")
    if fam == "skew-cycle":
        M = gen_skew_cycle(args.n, args.variant, _field(args))
    elif fam == "sym-cycle":
        M = gen_sym_cycle(args.n, args.variant, _field(args))
    elif fam == "random-dense":
        M = gen_random_dense(_field(args), args.n, args.seed)
    else:
        if args.input is None or args.set is None:
            raise InputError("flip needs --input and --set")
        A = run.matrix("input", args.input)
        X = [x for x in args.set.split(",") if x]
        M = flip_on_set(A, X)
    _emit(M.dumps(), args.output)
    return EXIT_OK


def cmd_pu_check(args, run: _Run) -> int:
    A = run.matrix("matrix", args.matrix)
    if args.mode == "wesp":
        if A.n < 4:
            run.note("no 4-element subsets; the order-4 criterion holds vacuously")
        ok = wesp_check(A)
    else:
        ok = is_principally_unimodular(A)
    return run.report("ok" if ok else "negative", {"mode": args.mode, "principally_unimodular": ok})


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skewminor", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--quiet", "-q", action="store_true", help="suppress diagnostics on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze", help="clan, separability and HL-decomposability report")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("compare", help="(<=k)-HL-equivalence of two matrices")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--order", "-k", type=int)
    s.add_argument("--full", action="store_true", help="list every mismatching subset")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("witness", help="recover D with B = DAD or B^t = DAD")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--verify-input", action="store_true")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("apply", help="apply a witness file to a matrix")
    s.add_argument("matrix")
    s.add_argument("witness")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_apply)

    s = sub.add_parser("minors", help="dump the principal-minor table")
    s.add_argument("matrix")
    s.add_argument("--order", "-k", type=int)
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_minors)

    s = sub.add_parser("reconstruct", help="rebuild dense skew matrices from a minor table")
    s.add_argument("minors")
    s.add_argument("--field", default="rational")
    s.add_argument("--p", type=int)
    s.add_argument("--limit", type=int)
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("generate", help="write a generated matrix file")
    s.add_argument("family", choices=["skew-cycle", "sym-cycle", "random-dense", "flip"])
    s.add_argument("--n", type=int)
    s.add_argument("--variant", choices=["A", "B"], default="A")
    s.add_argument("--field", default="rational")
    s.add_argument("--p", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--input")
    s.add_argument("--set", help="comma-separated labels")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("pu-check", help="principal unimodularity of a sign matrix")
    s.add_argument("matrix")
    s.add_argument("--mode", choices=["direct", "wesp"], default="direct")
    s.set_defaults(func=cmd_pu_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    run = _Run(args.command, args.quiet)
    try:
        return args.func(args, run)
    except InputError as exc:
        return run.report("input-error", message=str(exc))
    except (SkewMinorError, OSError) as exc:
        return run.report("input-error", message=str(exc))


if __name__ == "__main__":
    raise SystemExit(main())
