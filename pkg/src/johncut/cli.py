"""Command line: generate fixtures, decompose, certify.

Exit codes: 0 pass, 1 fail, 2 error."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import JohnCutError, MalformedInput
from .fixtures import KINDS, generate
from .report import RunConfig, certify_report, decompose_report, dumps, load_input, polygon_json
from .svg import render

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _params(items: list[str]) -> dict:
    out = {}
    for it in items or []:
        if "=" not in it:
            raise MalformedInput(f"parameter {it!r} is not key=value", step="generate")
        k, v = it.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args) -> RunConfig:
    return RunConfig(theta=args.theta, eta=args.eta, epsilon=args.epsilon, rho=args.rho, vartheta=args.vartheta,
                     omega=args.omega, samples=args.samples, seed=args.seed, stress=args.stress)


def cmd_generate(args) -> int:
    P = generate(args.kind, **_params(args.param))
    _emit(dumps(polygon_json(P, kind=args.kind, params=_params(args.param))), args.out)
    return EXIT_PASS


def cmd_decompose(args) -> int:
    cfg = _config(args)
    kind, obj = load_input(args.input)
    rep, drawing = decompose_report(kind, obj, cfg)
    _emit(dumps(rep), args.out)
    if args.svg:
        Path(args.svg).write_text(render(drawing["pieces"], drawing["exceptional"], drawing["cuts"], drawing["disks"],
                                         drawing["curve"], title=Path(args.input).name))
    n = len(rep["partition"]["pieces"])
    led = "pass" if rep["ledger"]["ledger_pass"] else "fail"
    print(f"pieces={n} ledger={led} status={rep['status']}", file=sys.stderr)
    return EXIT_PASS if rep["status"] == "pass" else EXIT_FAIL


def cmd_certify(args) -> int:
    cfg = _config(args)
    kind, P = load_input(args.input)
    if kind != "polygon":
        raise MalformedInput("certify needs a polygon input", step="certify")
    rep = certify_report(P, args.check, cfg)
    _emit(dumps(rep), args.out)
    print(f"{args.check} param={rep['param']} status={rep['status']}", file=sys.stderr)
    return EXIT_PASS if rep["status"] == "pass" else EXIT_FAIL


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="polygon or domain JSON")
    p.add_argument("--theta", type=float, default=0.25)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--epsilon", type=float, default=None, help="exceptional boundary budget (default 1%% of perimeter)")
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--vartheta", type=float, default=None)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--samples", type=int, default=200, help="John sample points per piece")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None, help="report path (default stdout)")
    p.add_argument("--stress", action="store_true", help="4x sampling densities")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="johncut", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    g = sub.add_parser("generate", help="write a fixture polygon")
    g.add_argument("kind", help=", ".join(KINDS))
    g.add_argument("--param", action="append", metavar="KEY=VALUE")
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_generate)
    d = sub.add_parser("decompose", help="run the full decomposition and certify the pieces")
    _common(d)
    d.add_argument("--svg", default=None)
    d.set_defaults(func=cmd_decompose)
    c = sub.add_parser("certify", help="run one certification")
    _common(c)
    c.add_argument("--check", required=True, choices=("semiconvex", "rotund", "john"))
    c.set_defaults(func=cmd_certify)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except JohnCutError as exc:
        print(f"error: {exc.describe()}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
