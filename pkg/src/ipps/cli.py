"""Command-line front end.

Exit codes: 0 success or pass, 1 property failure (witness JSON on stdout),
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import codes, construct, core, equations, report, verify

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _load_slopes(path: str, m: int) -> list[int]:
    raw = json.loads(_read(path))
    if isinstance(raw, dict):
        if "m" in raw and raw["m"] != m:
            raise InputError(f"slope set is for m={raw['m']}, not {m}")
        raw = raw.get("elements")
    if not isinstance(raw, list) or not all(isinstance(s, int) for s in raw):
        raise InputError("slope file must be a list of integers or {\"elements\": [...]}")
    return raw


def cmd_construct(args) -> int:
    if args.set:
        result = construct.run_construction(
            args.m, "provided-set", _load_slopes(args.set, args.m), verify_mode=args.verify_mode
        )
    else:
        result = construct.run_construction(args.m, verify_mode=args.verify_mode)
    _emit(core.serialize_set_system(result.system), args.out)
    sidecar = args.params or (f"{args.out}.params.json" if args.out else None)
    if sidecar:
        Path(sidecar).write_text(_dump(result.sidecar()), encoding="utf-8")
    return EXIT_OK


def cmd_verify(args) -> int:
    system = core.parse_set_system(_read(args.system))
    if args.mode == "bruteforce":
        rep = verify.verify_ipps_bruteforce(system, args.t)
    else:
        if args.t != 2:
            raise InputError("fast and exhaustive modes only cover t = 2; use --mode bruteforce")
        rep = verify.verify_ipps2(system, args.mode)
    sys.stdout.write(rep.to_json())
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify_code(args) -> int:
    code = codes.parse_code(_read(args.code))
    rep = codes.verify_ippc_bruteforce(code, args.t)
    sys.stdout.write(rep.to_json())
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_ks(args) -> int:
    code = codes.hamming_ternary() if args.code == "hamming" else codes.parse_code(_read(args.code))
    _emit(core.serialize_set_system(codes.kautz_singleton(code)), args.out)
    return EXIT_OK


def cmd_trace(args) -> int:
    system = core.parse_set_system(_read(args.system))
    raw = json.loads(_read(args.pirate))
    if isinstance(raw, dict):
        raw = raw.get("T")
    if not isinstance(raw, list):
        raise InputError("pirate file must be a list of points")
    T = [system.encode(p) for p in raw]
    result = verify.trace(system, T, args.t)
    out = {
        "status": result.status,
        "traitors": sorted(result.traitors),
        "parent_sets": [list(p) for p in result.parents],
    }
    sys.stdout.write(_dump(out))
    return EXIT_FAIL if result.status == "unidentifiable" else EXIT_OK


def cmd_derive_eqs(args) -> int:
    params = construct.ConstructionParams.for_m(args.m)
    if args.cases:
        rows = []
        for c in construct.derive_cases(params):
            rows.append(
                {
                    "case": c.case,
                    "coordinates": list(c.coordinates),
                    "matching": list(c.matching),
                    "outcome": c.outcome,
                    "raw": list(c.raw) if c.raw else None,
                    "equation": equations.equation_to_list(c.equation) if c.equation else None,
                    "coincident": list(c.coincident) if c.coincident else None,
                }
            )
        _emit(_dump(rows), args.out)
    else:
        header = f"# m={params.m} q={params.q} n={params.n}\n"
        _emit(header + equations.format_equations(construct.derive_required_equations(params)), args.out)
    return EXIT_OK


def cmd_greedy_set(args) -> int:
    if args.equations:
        eqs = equations.parse_equations(_read(args.equations))
    else:
        eqs = construct.derive_required_equations(construct.ConstructionParams.for_m(args.m))
    result = equations.greedy_solution_free(args.m, eqs)
    _emit(result.to_json(), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    rep = report.bounds_report(args.n, args.k, args.t, args.achieved)
    sys.stdout.write(_dump(rep.to_dict()))
    return EXIT_OK


def cmd_experiment(args) -> int:
    table = report.run_experiment(args.m, seed=args.seed, mode=args.verify_mode, jobs=args.jobs)
    _emit(table, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ipps", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a 2-IPPS(n,4) system for a given m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--set", help="JSON slope set to use instead of the greedy one")
    p.add_argument("--out", help="system JSON path (default stdout)")
    p.add_argument("--params", help="parameter sidecar path (default OUT.params.json)")
    p.add_argument("--verify-mode", choices=("fast", "exhaustive"), default="fast")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="check a set system for the parent-identifying property")
    p.add_argument("system")
    p.add_argument("--mode", choices=("fast", "exhaustive", "bruteforce"), default="fast")
    p.add_argument("--t", type=int, default=2)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("verify-code", help="check a code for the parent-identifying property")
    p.add_argument("code")
    p.add_argument("--t", type=int, default=2)
    p.set_defaults(func=cmd_verify_code)

    p = sub.add_parser("ks", help="Kautz-Singleton map from a code to a set system")
    p.add_argument("code", help="code JSON path, or 'hamming' for the ternary Hamming code")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("trace", help="blocks common to every parent set of a pirate")
    p.add_argument("system")
    p.add_argument("--pirate", required=True)
    p.add_argument("--t", type=int, default=2)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("derive-eqs", help="equations a slope set must avoid")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--cases", action="store_true", help="dump every case and matching as JSON")
    p.add_argument("--out")
    p.set_defaults(func=cmd_derive_eqs)

    p = sub.add_parser("greedy-set", help="first-fit solution-free set in [1, m]")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--equations", help="equation list file (default: derived for m)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_greedy_set)

    p = sub.add_parser("bounds", help="known bounds on I_t(n,k)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--achieved", type=int)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("experiment", help="CSV table of constructions over several m")
    p.add_argument("--m", type=int, nargs="+", required=True)
    p.add_argument("--seed", type=int, default=20190101)
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default $IPPS_JOBS or 1)")
    p.add_argument("--verify-mode", choices=("fast", "exhaustive"), default="fast")
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, core.ValidationError, verify.GuardExceeded, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
