"""``folium`` command-line entry point.

Every subcommand reads JSON inputs, prints one JSON report on standard
output and exits with 0 (success), 2 (precondition violated), 3 (numerical
failure) or 64 (usage error).  Reports carry a schema tag and the effective
run configuration; floats are written with 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields
from importlib import resources

import numpy as np

from .baire_path import path_report
from .errors import DomainError, NumericalError
from .foliation import OneForm, blow_up, involution_of, is_T1
from .involutions import Involution, check_involution, g_orbit_equivalent
from .rational.families import RationalFamily, classify_critical_curves, verify_dR_factor
from .rational.maps import RationalMap, critical_data, complex_to_json
from .rational.monodromy import make_bouquet, monodromy, monodromy_group, _map_avoid
from .rational.quintic import quintic_search, quintic_verify
from .series import Series1, norm_d, norm_l1, rescale

SCHEMA_TAG = "folium.report/v1"
EXIT_OK, EXIT_DOMAIN, EXIT_NUMERICAL, EXIT_USAGE = 0, 2, 3, 64
COMMANDS = ("blowup", "t1", "involution", "check-inv", "orbit", "gtpath", "norms",
            "critical", "monodromy", "classify", "quintic")


@dataclass
class RunConfig:
    N: int = 24
    eps_coef: float = 1e-10
    eps_root: float = 1e-8
    eps_match: float = 1e-8
    seed: int = 0
    budget: int = 100000
    depth: int = 6

    def validate(self) -> None:
        if self.N < 4:
            raise DomainError(f"truncation order N must be >= 4, got {self.N}")
        for name in ("eps_coef", "eps_root", "eps_match"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.budget < 1:
            raise DomainError("budget must be positive")


def load_config(path: str | None, overrides: dict) -> RunConfig:
    cfg = RunConfig()
    known = {f.name: f.type for f in fields(RunConfig)}
    if path:
        if sys.version_info >= (3, 11):
            import tomllib
        else:
            import tomli as tomllib
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        for key, val in data.items():
            if key not in known:
                raise DomainError(f"unknown configuration key {key!r}")
            setattr(cfg, key, type(getattr(cfg, key))(val))
    env_seed = os.environ.get("FOLIUM_SEED")
    if env_seed is not None:
        try:
            cfg.seed = int(env_seed)
        except ValueError:
            raise DomainError(f"FOLIUM_SEED must be an integer, got {env_seed!r}") from None
    for key, val in overrides.items():
        if val is not None:
            setattr(cfg, key, val)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# JSON output with fixed float formatting

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if all(ch not in s for ch in ".eEn"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps(complex_to_json(obj), indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(dumps(v) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent, _level + 1) for v in seq) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load_schema() -> dict:
    return json.loads(resources.files("folium").joinpath("report.schema.json").read_text())


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path} is not valid JSON: {exc}") from None


def _load(path: str, decode):
    """Read ``path`` and decode it; malformed content is a precondition failure."""
    data = _read_json(path)
    try:
        return decode(data)
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise DomainError(f"{path} does not describe the expected object: {type(exc).__name__} {exc}") from None


def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


# ---------------------------------------------------------------------------
# subcommands

def cmd_blowup(args, cfg):
    omega_t, k = blow_up(_load(args.form, OneForm.from_json), cfg.eps_coef)
    return {"form": omega_t.to_json(), "k": k}


def cmd_t1(args, cfg):
    return is_T1(_load(args.form, OneForm.from_json), cfg.eps_coef).to_json()


def cmd_involution(args, cfg):
    order = args.order if args.order is not None else cfg.N
    inv = involution_of(_load(args.form, OneForm.from_json), order, check_t1=not args.no_t1_check)
    return {"involution": inv.to_json()}


def cmd_check_inv(args, cfg):
    s = _load(args.series, Series1.from_json)
    rep = check_involution(s, args.k, cfg.eps_coef)
    ff = None if rep.first_failure is None else {"power": rep.first_failure[0],
                                                 "defect": complex_to_json(rep.first_failure[1])}
    return {"verified_order": rep.verified_order, "requested": rep.requested, "passed": rep.passed,
            "first_failure": ff}


def cmd_orbit(args, cfg):
    i1 = _load(args.inv1, Involution.from_json)
    i2 = _load(args.inv2, Involution.from_json)
    k = args.k if args.k is not None else min(i1.order, i2.order)
    res = g_orbit_equivalent(i1, i2, k, cfg.eps_match, np.random.default_rng(cfg.seed))
    return res.to_json()


def cmd_gtpath(args, cfg):
    inv = _load(args.inv, Involution.from_json)
    rep = path_report(inv, args.m, cfg.eps_coef)
    out = rep.to_json()
    if args.u is not None:
        out["u"] = complex_to_json(args.u)
        out["alpha_coeff_m"] = complex_to_json(rep.alpha_coeff_m(args.u))
    return out


def cmd_norms(args, cfg):
    s = _load(args.series, Series1.from_json)
    out = {"norm_d": norm_d(s), "norm_l1": norm_l1(s)}
    if args.lam:
        out["rescaled"] = [{"lambda": lam, "norm_l1_distance": norm_l1(rescale(s, lam) - s)}
                           for lam in args.lam]
    return out


def cmd_critical(args, cfg):
    R = _load(args.map, RationalMap.from_json)
    data = critical_data(R, cfg.eps_root)
    return {"degree": R.degree, "critical_points": [c.to_json() for c in data],
            "riemann_hurwitz": {"sum": sum(c.order for c in data), "expected": 2 * R.degree - 2}}


def cmd_monodromy(args, cfg):
    R = _load(args.map, RationalMap.from_json)
    if args.around is None:
        return monodromy_group(R, refine=args.refine, eps_root=cfg.eps_root).to_json()
    vals, avoid = _map_avoid(R, cfg.eps_root)
    bq = make_bouquet(vals, avoid)
    target = args.around
    dist = [abs(v - target) for v in bq.values]
    if not dist or min(dist) > 1e-6 * max(1.0, abs(target)):
        raise DomainError(f"{target} is not a finite critical value; critical values are "
                          f"{[complex_to_json(v) for v in bq.values]}")
    idx = int(np.argmin(dist))
    perm = monodromy(R, bq.base, list(bq.loops[idx]), refine=args.refine, avoid=vals)
    return {"base": complex_to_json(bq.base), "around": complex_to_json(bq.values[idx]),
            "permutation": perm.to_json(), "cycle_type": list(perm.cycle_type())}


def cmd_classify(args, cfg):
    fam = _load(args.family, RationalFamily.from_json)
    branches = classify_critical_curves(fam, cfg.eps_root)
    out = []
    for b in branches:
        entry = b.to_json()
        if b.supported:
            entry["dR_factor"] = verify_dR_factor(fam, b, b.order).to_json()
        out.append(entry)
    return {"degree": fam.degree, "branches": out}


def _quintic_coeffs(data) -> list[complex]:
    coeffs = data["coeffs"] if isinstance(data, dict) else data
    return [complex(*c) if isinstance(c, list) else complex(c) for c in coeffs]


def cmd_quintic(args, cfg):
    if args.verify:
        coeffs = _load(args.verify, _quintic_coeffs)
        return quintic_verify(coeffs).to_json()
    cert = quintic_search(cfg.seed, cfg.budget)
    return {"certificate": cert.to_json(), "verdict": quintic_verify(cert.polynomial).to_json()}


HANDLERS = {
    "blowup": cmd_blowup, "t1": cmd_t1, "involution": cmd_involution, "check-inv": cmd_check_inv,
    "orbit": cmd_orbit, "gtpath": cmd_gtpath, "norms": cmd_norms, "critical": cmd_critical,
    "monodromy": cmd_monodromy, "classify": cmd_classify, "quintic": cmd_quintic,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="TOML file with RunConfig keys")
    common.add_argument("--seed", type=int, help="seed for every random choice")
    common.add_argument("--N", type=int, dest="N", help="truncation order")
    parser = _Parser(prog="folium", description="Foliation germs, involutions and rational families.",
                     parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add_parser("blowup", help="blow up a 1-form")
    p.add_argument("--form", required=True)
    p = add_parser("t1", help="test the T1 jet conditions")
    p.add_argument("--form", required=True)
    p = add_parser("involution", help="tangency involution of a T1 germ")
    p.add_argument("--form", required=True)
    p.add_argument("--order", type=int)
    p.add_argument("--no-t1-check", action="store_true")
    p = add_parser("check-inv", help="verified involutive order of a series")
    p.add_argument("--series", required=True)
    p.add_argument("--k", type=int)
    p = add_parser("orbit", help="Moebius conjugacy of two involutions")
    p.add_argument("--inv1", required=True)
    p.add_argument("--inv2", required=True)
    p.add_argument("--k", type=int)
    p = add_parser("gtpath", help="first variation of the conjugation path")
    p.add_argument("--inv", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--u", type=_complex_arg)
    p = add_parser("norms", help="factorial-weighted and l1 norms")
    p.add_argument("--series", required=True)
    p.add_argument("--lambda", dest="lam", type=float, action="append")
    p = add_parser("critical", help="critical points of a rational map")
    p.add_argument("--map", required=True)
    p = add_parser("monodromy", help="monodromy generators or one loop")
    p.add_argument("--map", required=True)
    p.add_argument("--around", type=_complex_arg)
    p.add_argument("--refine", type=int, default=1)
    p = add_parser("classify", help="critical curves of a family")
    p.add_argument("--family", required=True)
    p = add_parser("quintic", help="search or verify a quintic certificate")
    p.add_argument("--budget", type=int)
    p.add_argument("--verify")
    return parser


def run(argv: list[str], out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    report = {"schema": SCHEMA_TAG, "command": args.command}
    code = EXIT_OK
    try:
        overrides = {"seed": getattr(args, "seed", None), "N": getattr(args, "N", None),
                     "budget": getattr(args, "budget", None)}
        cfg = load_config(getattr(args, "config", None), overrides)
        report["config"] = asdict(cfg)
        report["result"] = HANDLERS[args.command](args, cfg)
    except DomainError as exc:
        code = EXIT_DOMAIN
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        code = EXIT_NUMERICAL
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
    report.setdefault("config", asdict(RunConfig()))
    out.write(dumps(report) + "\n")
    return code


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
