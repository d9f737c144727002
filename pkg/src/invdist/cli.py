"""Command-line entry point: verify, maps, sets, weil, report."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import geometry as geo
from . import harmonic as hm
from . import orbits
from . import suites
from . import weil as wl
from .linalg import Matrix
from .scalars import parse_rational
from .xspace import PointX

log = logging.getLogger("invdist")

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _level(s: str) -> tuple[int, int]:
    try:
        m, k = (int(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"level must look like 'm,k', got {s!r}")
    return m, k


def _samples(s: str) -> tuple[str, ...]:
    vals = tuple(x.strip() for x in s.split(",") if x.strip())
    for x in vals:
        try:
            parse_rational(x)
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"bad lambda sample {x!r}")
    return vals


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}")


def _print(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# verify / sets


def _config_from_args(suite: str | None, args) -> suites.SuiteConfig:
    data = {}
    if getattr(args, "config", None):
        data = _load_json(args.config)
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    if suite:
        data["suite"] = suite
    for key in ("field", "n", "seed", "p", "d", "form", "samples", "multiplier", "output"):
        v = getattr(args, key, None)
        if v is not None:
            data[key] = v
    if getattr(args, "lambda_samples", None) is not None:
        data["lambda_samples"] = list(args.lambda_samples)
    if getattr(args, "level", None) is not None:
        data["m"], data["k"] = args.level
    if "suite" not in data:
        raise UsageError("no suite given (positional argument or 'suite' in --config)")
    return suites.SuiteConfig.from_json(data).validate()


def _run_and_emit(cfg: suites.SuiteConfig, args) -> int:
    rep = suites.run_suite(cfg, workers=getattr(args, "workers", None))
    obj = suites.emit_report(rep, cfg.output, getattr(args, "markdown", None))
    if not cfg.output:
        _print(obj)
    s = rep.summary
    log.info("%s: %d pass, %d fail, %d skipped", cfg.suite, s["pass"], s["fail"], s["skipped"])
    return rep.exit_code


def cmd_verify(args) -> int:
    if args.list:
        for name in sorted(suites.SUITES):
            print(name)
        return EXIT_OK
    return _run_and_emit(_config_from_args(args.suite, args), args)


def cmd_sets(args) -> int:
    return _run_and_emit(_config_from_args(suites.LEMMA_SUITES[args.lemma], args), args)


# ---------------------------------------------------------------------------
# maps


def _read_matrix(obj) -> Matrix:
    if "entries" not in obj:
        raise UsageError("matrix input needs an 'entries' key")
    return Matrix.from_json(obj)


def cmd_maps(args) -> int:
    obj = _load_json(args.input)
    name = args.map
    if name in ("block-unslice", "nu"):
        pt = PointX.from_json(obj)
        if args.value is None:
            raise UsageError(f"{name} needs --value")
        if name == "nu":
            out = {"point": geo.nu(parse_rational(args.value), pt).to_json()}
        else:
            out = {"matrix": orbits.block_unslice(pt, parse_rational(args.value)).to_json()}
        _print(out)
        return EXIT_OK
    A = _read_matrix(obj)
    if name == "trace-slice":
        out = {"matrix": orbits.trace_slice(A).to_json(), "trace": str(A.trace())}
    elif name == "trace-unslice":
        if args.value is None:
            raise UsageError("trace-unslice needs --value (the trace)")
        out = {"matrix": orbits.trace_unslice(A, parse_rational(args.value)).to_json()}
    elif name == "block-slice":
        if A.trace():
            raise UsageError("block-slice needs a traceless matrix (apply trace-slice first)")
        out = {"point": orbits.block_slice(A).to_json(), "corner": str(A[A.n - 1, A.n - 1])}
    elif name == "jordan-chevalley":
        jc = orbits.jordan_chevalley(A)
        out = {"semisimple": jc.semisimple.to_json(), "nilpotent": jc.nilpotent.to_json()}
    elif name == "profile":
        out = orbits.nilpotent_profile(A).to_json()
    elif name == "centralizer":
        rep = orbits.centralizer(A)
        out = {"dimension": rep.dimension, "predicted_dimension": rep.predicted_dimension,
               "factors": None if rep.factors is None else
               [{"poly": [str(c) for c in f], "multiplicity": k, "degree": d} for f, k, d in rep.factors]}
    else:
        raise UsageError(f"unknown map {name!r}")
    _print(out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# weil


def cmd_weil(args) -> int:
    m, k = args.level
    if args.p ** ((m + k) * args.d) > hm.MAX_POINTS:
        raise suites.CapError(f"p^((m+k)d) exceeds {hm.MAX_POINTS}")
    B = hm.BilinearForm.from_spec(args.form, args.p, args.d)
    w1, w2 = wl.relation_words(args.relation, parse_rational(args.t))
    v = wl.projective_check(w1, w2, B, hm.Level(m, k), args.multiplier)
    out = {"relation": args.relation, "t": args.t, "p": args.p, "d": args.d, "level": [m, k],
           "form": B.to_json(), "multiplier": args.multiplier,
           "word1": suites._words_json(w1), "word2": suites._words_json(w2), "verdict": v.to_json(),
           "status": "pass" if v.ok else "fail"}
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(out, fh, indent=2, sort_keys=True)
            fh.write("\n")
    _print(out)
    return EXIT_OK if v.ok else EXIT_FALSIFIED


# ---------------------------------------------------------------------------
# report


def cmd_report(args) -> int:
    from .report import write_report

    obj = _load_json(args.input)
    try:
        rep = suites.Report.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{args.input} is not a suite report: {exc}")
    _print(write_report(rep, args.out_dir))
    return rep.exit_code


# ---------------------------------------------------------------------------


def _add_suite_flags(p: argparse.ArgumentParser, lemma: bool = False):
    p.add_argument("--field", help="Q, gf2, gf3, gf5 (comma-separated where a suite allows several)")
    p.add_argument("--n", type=int, help="dimension or block size")
    p.add_argument("--lambda-samples", type=_samples, help="comma-separated lambda values, e.g. 0,1,-1,1/2")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, help="number of random cases")
    p.add_argument("--config", help="JSON config file; explicit flags override it")
    p.add_argument("--output", help="write the JSON report here instead of stdout")
    p.add_argument("--markdown", help="also write a markdown summary")
    p.add_argument("--workers", type=int, help="worker processes (VERIFY_WORKERS caps this)")
    if not lemma:
        p.add_argument("--p", type=int)
        p.add_argument("--d", type=int)
        p.add_argument("--level", type=_level, help="m,k")
        p.add_argument("--form", help="hyperbolic or diag:a,b,...")
        p.add_argument("--multiplier", choices=wl.MULTIPLIERS)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="invdist", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a registered suite")
    p.add_argument("suite", nargs="?")
    p.add_argument("--list", action="store_true", help="list suites and exit")
    _add_suite_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sets", help="containment lemmas for Q_A, Z and the sampled O~")
    p.add_argument("--lemma", required=True, choices=sorted(suites.LEMMA_SUITES))
    _add_suite_flags(p, lemma=True)
    p.set_defaults(func=cmd_sets)

    p = sub.add_parser("maps", help="slice maps, Jordan-Chevalley, profiles, shears")
    p.add_argument("--map", required=True, choices=["trace-slice", "trace-unslice", "block-slice", "block-unslice",
                                                      "jordan-chevalley", "profile", "centralizer", "nu"])
    p.add_argument("--input", required=True, help="JSON matrix {field, entries} or point {field, A, v, phi}")
    p.add_argument("--value", help="trace, corner entry or lambda, as needed by the map")
    p.set_defaults(func=cmd_maps)

    p = sub.add_parser("weil", help="check one projective relation of the Weil operators")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--level", type=_level, default=(1, 1))
    p.add_argument("--form", default="hyperbolic")
    p.add_argument("--relation", default="conj-unipotent", choices=list(wl.RELATIONS))
    p.add_argument("--t", default="1")
    p.add_argument("--multiplier", default="literal", choices=wl.MULTIPLIERS)
    p.add_argument("--report", help="write the verdict JSON here")
    p.set_defaults(func=cmd_weil)

    p = sub.add_parser("report", help="render a JSON suite report as markdown and PNG figures")
    p.add_argument("--input", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, suites.CapError, suites.UnknownSuite, ValueError, hm.LevelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
