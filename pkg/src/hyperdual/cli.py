"""Command-line front end.

Exit codes: 0 when every verdict passes, 1 when any check fails, 2 for
rejected parameters and usage or configuration errors.
"""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import HyperdualError
from .identities import REGISTRY, ModularPair, ReductionScaling, get_identity, reduction_check
from .series import expand_e6
from .specfun import DEFAULT_POLICY, TruncationPolicy
from .verify import SamplerConfig, sweep, verify_identity

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- canonical JSON -------------------------------------------------------------


def _encode(obj) -> str:
    if isinstance(obj, np.generic):
        obj = obj.item()
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = format(obj, ".17g")
        # keep floats distinguishable from ints so parsing round-trips (e.g. -0.0)
        return text if any(c in text for c in ".e") else text + ".0"
    if isinstance(obj, complex):
        return _encode({"re": obj.real, "im": obj.imag})
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Sorted keys, floats with 17 significant digits, complex as {re, im}."""
    return _encode(obj)


def report_json(report, seed: int | None = None) -> dict:
    return {
        "identity": report.identity_id,
        "params": [{"name": n, "re": v.real, "im": v.imag} for n, v in report.parameters],
        "lhs": report.lhs,
        "rhs": report.rhs,
        "abs_error": report.abs_error,
        "rel_error": report.rel_error,
        "tolerance": report.tolerance,
        "convergence": report.convergence,
        "verdict": report.verdict,
        "reason": report.reason,
        "seed": seed,
        "tool_version": __version__,
    }


# --- configuration --------------------------------------------------------------


@dataclasses.dataclass
class RunConfig:
    identity_id: str
    mode: str  # "random" | "explicit"
    seed: int = 0
    n_samples: int = 1
    explicit: list = dataclasses.field(default_factory=list)  # [(name, re, im)]
    policy: TruncationPolicy = DEFAULT_POLICY
    options: dict = dataclasses.field(default_factory=dict)
    tolerance: float | None = None
    out: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("random", "explicit"):
            raise UsageError(f"mode must be random or explicit, got {self.mode!r}")
        if self.mode == "explicit" and not self.explicit:
            raise UsageError("explicit mode needs parameters")
        if self.mode == "random" and self.n_samples < 1:
            raise UsageError("--samples must be >= 1")


def parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", ""))
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def _assignment(text: str) -> tuple[str, complex]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise UsageError(f"expected name=value, got {text!r}")
    return name.strip(), parse_complex(value)


_POLICY_TYPES = {f.name: f.type for f in dataclasses.fields(TruncationPolicy)}


def _policy_from(section) -> TruncationPolicy:
    kwargs = {}
    for key, raw in section.items():
        if key not in _POLICY_TYPES:
            raise UsageError(f"unknown policy field {key!r}")
        kind = _POLICY_TYPES[key]
        try:
            if kind in (bool, "bool"):
                kwargs[key] = section.getboolean(key)
            elif kind in (int, "int"):
                kwargs[key] = int(raw)
            else:
                kwargs[key] = float(raw)
        except ValueError as exc:
            raise UsageError(f"policy field {key}: {exc}") from None
    try:
        return TruncationPolicy(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def read_params_file(path: str) -> dict:
    """Sections [run], [params], [policy], [options] of an INI-style file."""
    parser = configparser.ConfigParser()
    parser.optionxform = str  # parameter names are case sensitive
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    out: dict = {}
    if parser.has_section("run"):
        out["run"] = dict(parser["run"])
    if parser.has_section("params"):
        out["params"] = [_assignment(f"{k}={v}") for k, v in parser["params"].items()]
    if parser.has_section("policy"):
        out["policy"] = _policy_from(parser["policy"])
    if parser.has_section("options"):
        out["options"] = {k: int(parse_complex(v).real) for k, v in parser["options"].items()}
    return out


def build_run_config(args) -> RunConfig:
    file_cfg = read_params_file(args.params) if args.params else {}
    run = file_cfg.get("run", {})
    identity = args.identity or run.get("identity")
    if not identity:
        raise UsageError("no identity given")
    explicit = list(file_cfg.get("params", []))
    explicit += [_assignment(a) for a in (args.explicit or [])]
    if args.random:
        mode = "random"
    elif args.explicit is not None:
        mode = "explicit"
    else:
        mode = run.get("mode", "explicit" if explicit else "random")
    try:
        seed = args.seed if args.seed is not None else int(run.get("seed", 0))
        n = args.samples if args.samples is not None else int(run.get("samples", 1))
        tol = args.tolerance if args.tolerance is not None else (
            float(run["tolerance"]) if "tolerance" in run else None)
    except ValueError as exc:
        raise UsageError(f"[run] section: {exc}") from None
    options = dict(file_cfg.get("options", {}))
    options.update({k: int(v.real) for k, v in (_assignment(o) for o in args.option or [])})
    return RunConfig(
        identity_id=identity,
        mode=mode,
        seed=seed,
        n_samples=n,
        explicit=[(k, v.real, v.imag) for k, v in explicit],
        policy=file_cfg.get("policy", DEFAULT_POLICY),
        options=options,
        tolerance=tol,
        out=args.out or run.get("out"),
        workers=args.workers,
    )


# --- commands -------------------------------------------------------------------


def _emit(text: str, out: str | None, to_stdout: bool):
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    if to_stdout:
        print(text)


def cmd_list(args) -> int:
    rows = [{"identity": i.identity_id, "anchor": i.anchor, "arity": i.arity,
             "tolerance": i.tolerance, "constraint": i.constraint} for i in REGISTRY.values()]
    if args.json:
        print(canonical_json(rows))
        return EXIT_PASS
    width = max(len(r["identity"]) for r in rows)
    for r in rows:
        print(f"{r['identity']:<{width}}  [{r['arity']}]  {r['anchor']}")
    return EXIT_PASS


def cmd_verify(args) -> int:
    cfg = build_run_config(args)
    get_identity(cfg.identity_id)
    if cfg.mode == "explicit":
        params = {name: complex(re, im) for name, re, im in cfg.explicit}
        reports = [verify_identity(cfg.identity_id, params, cfg.policy, cfg.tolerance)]
        seed = None
    else:
        config = SamplerConfig(cfg.seed, cfg.n_samples, options=cfg.options)
        result = sweep(cfg.identity_id, config, cfg.policy, cfg.workers, cfg.tolerance)
        reports = list(result.reports)
        seed = cfg.seed
    rels = [r.rel_error for r in reports if r.rel_error is not None]
    doc = {
        "identity": cfg.identity_id,
        "mode": cfg.mode,
        "seed": seed,
        "n_samples": len(reports),
        "n_pass": sum(r.passed for r in reports),
        "n_fail": sum(r.verdict == "fail" for r in reports),
        "n_rejected": sum(r.rejected for r in reports),
        "max_rel_error": max(rels) if rels else None,
        "reports": [report_json(r, seed) for r in reports],
        "tool_version": __version__,
    }
    _emit(canonical_json(doc), cfg.out, args.json)
    if not args.json:
        for i, r in enumerate(reports):
            rel = "-" if r.rel_error is None else f"{r.rel_error:.3e}"
            note = f"  ({r.reason})" if r.reason and not r.passed else ""
            print(f"{cfg.identity_id}[{i}] rel_error={rel} verdict={r.verdict}{note}")
        print(f"{doc['n_pass']}/{len(reports)} pass")
    if doc["n_rejected"]:
        return EXIT_USAGE
    return EXIT_FAIL if doc["n_fail"] else EXIT_PASS


def cmd_expand_e6(args) -> int:
    series = expand_e6(args.order)
    doc = {"order": args.order, "records": series.to_records(), "series": series.to_text(),
           "tool_version": __version__}
    _emit(canonical_json(doc), args.out, True)
    return EXIT_PASS


def cmd_reduce_check(args) -> int:
    vs = args.v or []
    if not vs:
        raise UsageError("reduce-check needs at least one --v value")
    if any(not v > 0 for v in vs):
        raise UsageError("v values must be positive")
    if any(b >= a for a, b in zip(vs, vs[1:])):
        raise UsageError("v values must be sorted in strictly descending order")
    pair = ModularPair(parse_complex(args.omega1), parse_complex(args.omega2))
    z = parse_complex(args.z)
    rot = None if args.rotation is None else parse_complex(args.rotation)
    devs = [reduction_check(ReductionScaling(v, pair, z, rot)) for v in vs]
    doc = {"v": vs, "deviations": devs, "z": z, "omega1": pair.omega1, "omega2": pair.omega2,
           "direction": ReductionScaling(vs[0], pair, z, rot).direction,
           "tool_version": __version__}
    monotone = None
    if len(vs) > 1:
        monotone = all(b < a for a, b in zip(devs, devs[1:]))
        doc["monotone_decreasing"] = monotone
    _emit(canonical_json(doc), args.out, True)
    return EXIT_FAIL if monotone is False else EXIT_PASS


# --- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperdual", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="catalog of identities")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("verify", help="evaluate both sides of an identity")
    p.add_argument("identity", nargs="?")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--random", action="store_true", help="sample seeded parameter sets")
    mode.add_argument("--explicit", nargs="*", metavar="NAME=VALUE",
                      help="parameter values, complex literals allowed (e.g. p=0.1+0.05j)")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", "-n", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--option", action="append", metavar="NAME=INT",
                   help="sampler option such as N=1, K=1, Nf=4")
    p.add_argument("--params", metavar="FILE", help="INI file with [run], [params], [policy]")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("expand-e6", help="exact t-expansion of the 4d/5d index")
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_expand_e6)

    p = sub.add_parser("reduce-check", help="elliptic -> hyperbolic gamma limit")
    p.add_argument("--v", type=float, nargs="*", default=[])
    p.add_argument("--z", default="0.4")
    p.add_argument("--omega1", default="1j")
    p.add_argument("--omega2", default="1")
    p.add_argument("--rotation", default=None, help="unit complex multiplying v")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_reduce_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, HyperdualError, ValueError, TypeError) as exc:
        code = exc.code if isinstance(exc, HyperdualError) else type(exc).__name__
        print(f"hyperdual: error: {code}: {exc}", file=sys.stderr)
        return EXIT_USAGE
