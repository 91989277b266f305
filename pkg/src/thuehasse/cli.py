"""Command-line interface: analyze, descend, local, solve, construct, density, audit."""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import logging
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .forms import BinaryForm, content, discriminant, height, is_maximal, non_maximal_primes

EXIT_OK = 0
EXIT_SOLUTIONS = 1
EXIT_BUDGET = 2
EXIT_AUDIT = 3
EXIT_USAGE = 64

_FORM_RE = re.compile(r"^\s*\[\s*([-+]?\d+(\s*,\s*[-+]?\d+)*)\s*\]\s*$")


def parse_form(text: str) -> BinaryForm:
    m = _FORM_RE.match(text)
    if not m:
        raise ValueError(f"malformed form {text!r}; expected [f0,f1,...,fn]")
    coeffs = [int(c) for c in m.group(1).split(",")]
    if len(coeffs) < 2:
        raise ValueError("a form needs at least 2 coefficients")
    return BinaryForm(coeffs)


def serialize_form(F: BinaryForm) -> str:
    return "[" + ",".join(str(c) for c in F.coeffs) + "]"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class RunManifest:
    command: list[str]
    params: dict
    seed: Optional[int] = None
    started: str = field(default_factory=_now)
    finished: Optional[str] = None
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    version: str = __version__

    def to_json(self) -> dict:
        return {
            "tool": "thuehasse",
            "version": self.version,
            "command": self.command,
            "params": self.params,
            "seed": None if self.seed is None else str(self.seed),
            "started": self.started,
            "finished": self.finished,
            "inputs": self.inputs,
            "outputs": self.outputs,
        }

    def write(self, path: Path, files: Sequence[Path]) -> None:
        self.finished = _now()
        self.outputs = {f.name: sha256_file(f) for f in files}
        path.write_text(dumps(self.to_json()), encoding="utf-8", newline="\n")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("THREADS", os.cpu_count() or 1)))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="thuehasse", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    a = sub.add_parser("analyze", help="discriminant, content, height, maximality of a form")
    a.add_argument("form")
    a.add_argument("--galois", action="store_true", help="also certify the Galois group")
    a.add_argument("--out")

    d = sub.add_parser("descend", help="descended forms at one or more primes")
    d.add_argument("form")
    d.add_argument("--primes", required=True, help="comma-separated ascending primes")
    d.add_argument("--out")

    lo = sub.add_parser("local", help="local solubility of F(x,y) = h")
    lo.add_argument("form")
    lo.add_argument("--h", type=int, default=1)
    lo.add_argument("--prime", type=int, help="decide at this prime only")
    lo.add_argument("--depth", type=int)
    lo.add_argument("--out")

    s = sub.add_parser("solve", help="solutions of F(x,y) = h in a box")
    s.add_argument("form")
    s.add_argument("--h", type=int, default=1)
    s.add_argument("--box", type=int, default=100)
    s.add_argument("--json", action="store_true", help="print JSON instead of a table")
    s.add_argument("--out")

    c = sub.add_parser("construct", help="build F, descend, and write failure certificates")
    c.add_argument("--degree", type=int, required=True)
    c.add_argument("--h", type=int, default=1)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--scale", choices=["full", "demo"], default="full")
    c.add_argument("--box", type=int, default=100)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--threshold", type=int, help="discriminant threshold (demo scale only)")
    c.add_argument("--budget", type=int, default=4000)
    c.add_argument("--out", default="construct-out")

    de = sub.add_parser("density", help="truncated Euler product for a family density")
    de.add_argument("--degree", type=int, required=True)
    de.add_argument("--k", type=int, required=True)
    de.add_argument("--kind", required=True, choices=["F-cubic", "G-cubic", "F-general", "G-general"])
    de.add_argument("--cutoff", type=int, default=10**5)
    de.add_argument("--out")

    au = sub.add_parser("audit", help="re-validate a certificates file")
    au.add_argument("file")
    return p


def _emit(payload, out: Optional[str], argv: list[str], params: dict) -> None:
    text = dumps(payload)
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text, encoding="utf-8", newline="\n")
    manifest = RunManifest(list(argv), params)
    manifest.write(path.with_name(path.name + ".manifest.json"), [path])


def _cmd_analyze(args, argv) -> int:
    F = parse_form(args.form)
    D = discriminant(F)
    payload = {
        "form": F.to_json(),
        "degree": str(F.degree),
        "disc": str(D),
        "content": str(content(F)),
        "height": str(height(F)),
    }
    if D != 0:
        payload["maximal"] = is_maximal(F)
        payload["non_maximal_primes"] = [str(p) for p in non_maximal_primes(F)]
        if args.galois:
            from .construct import certify_galois

            payload["galois"] = certify_galois(F).to_json()
    _emit(payload, args.out, argv, {"form": args.form})
    return EXIT_OK


def _cmd_descend(args, argv) -> int:
    from .descent import descend_chain

    F = parse_form(args.form)
    primes = [int(p) for p in args.primes.split(",") if p.strip()]
    outs = descend_chain(F, primes)
    _emit([o.to_json() for o in outs], args.out, argv, {"form": args.form, "primes": args.primes})
    return EXIT_OK


def _cmd_local(args, argv) -> int:
    from .local import locally_represents_everywhere, soluble_p_adic

    F = parse_form(args.form)
    if args.prime is not None:
        payload = soluble_p_adic(F, args.h, args.prime, args.depth).to_json()
    else:
        payload = locally_represents_everywhere(F, args.h).to_json()
    _emit(payload, args.out, argv, {"form": args.form, "h": str(args.h)})
    return EXIT_OK


def _cmd_solve(args, argv) -> int:
    from .solve import enumerate_solutions

    F = parse_form(args.form)
    S = enumerate_solutions(F, args.h, args.box)
    if args.json or args.out:
        _emit(S.to_json(), args.out, argv, {"form": args.form, "h": str(args.h), "box": str(args.box)})
    else:
        print(f"F = {serialize_form(F)}, h = {args.h}, box = {args.box}")
        print(f"{'x':>12} {'y':>12}  primitive")
        import math

        for x, y in S.solutions:
            print(f"{x:>12} {y:>12}  {'yes' if math.gcd(x, y) == 1 else 'no'}")
        print(f"{len(S.solutions)} solutions, {S.primitive_count} primitive")
    return EXIT_SOLUTIONS if S.solutions else EXIT_OK


def _cmd_construct(args, argv) -> int:
    from .construct import ConstructionBudgetExceeded, GaloisTimeout, PipelineParams, run_pipeline

    params = PipelineParams(
        n=args.degree,
        h=args.h,
        k=args.k,
        scale=args.scale,
        box=args.box,
        seed=args.seed,
        threshold_override=args.threshold,
        budget=args.budget,
        workers=_threads(),
    )
    try:
        params.validate()
    except ValueError as exc:
        raise UsageError(str(exc))
    manifest = RunManifest(list(argv), params.to_json(), seed=args.seed)
    try:
        result = run_pipeline(params)
    except (ConstructionBudgetExceeded, GaloisTimeout) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cert_path = out / "certificates.json"
    summary_path = out / "summary.json"
    cert_path.write_text(dumps(result.certificates), encoding="utf-8", newline="\n")
    summary_path.write_text(dumps(result.summary), encoding="utf-8", newline="\n")
    manifest.write(out / "manifest.json", [cert_path, summary_path])
    s = result.summary
    print(
        f"{s['total']} forms, {s['with_solutions']} with solutions in the box, bound {s['theorem_bound']}, "
        f"{s['certificates']} certificates, guarantee {s['aggregate_guarantee']}"
    )
    return EXIT_OK


def _cmd_density(args, argv) -> int:
    from .density import density_lower_bound

    try:
        v = density_lower_bound(args.degree, args.k, args.kind, args.cutoff)
    except ValueError as exc:
        raise UsageError(str(exc))
    _emit(
        v.to_json(),
        args.out,
        argv,
        {"degree": str(args.degree), "k": str(args.k), "kind": args.kind, "cutoff": str(args.cutoff)},
    )
    return EXIT_OK


def _cmd_audit(args, argv) -> int:
    from .construct import audit_text

    path = Path(args.file)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(str(exc))
    results = audit_text(text)
    bad = 0
    for i, r in enumerate(results):
        if not r.valid:
            bad += 1
            print(f"certificate {i}: invalid ({r.reason})")
    print(f"{len(results) - bad}/{len(results)} certificates valid")
    return EXIT_OK if bad == 0 and results else EXIT_AUDIT


COMMANDS = {
    "analyze": _cmd_analyze,
    "descend": _cmd_descend,
    "local": _cmd_local,
    "solve": _cmd_solve,
    "construct": _cmd_construct,
    "density": _cmd_density,
    "audit": _cmd_audit,
}


def dispatch(argv: Sequence[str]) -> int:
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing command")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        return COMMANDS[args.command](args, argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[Sequence[str]] = None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
