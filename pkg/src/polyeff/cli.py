"""Command-line driver: check, elaborate, eval, verify.

Exit codes: 0 all checks passed, 1 type error or counterexample,
2 usage or configuration error, 3 out-of-bound request.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import encodings as enc
from . import finmodel as fm
from . import interp as ip
from . import paramlab as pl
from . import surface
from . import typecheck as tc
from .kernel import Judgment

SUITES = [
    "typing",
    "metatheory",
    "monad-laws",
    "rel-axioms",
    "identity-extension",
    "abstraction",
    "bang-laws",
    "free-algebra",
    "bang-cardinality",
    "rel-lifting",
    "algop",
    "handler",
    "encoding-props",
    "parametric-counts",
    "cbpv",
]


def _parser() -> argparse.ArgumentParser:
    # options are accepted both before and after the subcommand; SUPPRESS
    # keeps a subparser from clobbering values the main parser already set
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--monad", choices=["identity", "exception", "powerset"])
    common.add_argument("--exceptions", help="comma-separated exception names")
    common.add_argument("--bound", type=int)
    common.add_argument("--include-free-algebras", action="store_true")
    common.add_argument("--format", choices=["text", "json"])
    common.add_argument("--seed", type=int)
    common.add_argument("--config", help="JSON model-configuration file")
    p = argparse.ArgumentParser(prog="polyeff", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", parents=[common], help="parse and typecheck declaration files")
    c.add_argument("files", nargs="+")
    e = sub.add_parser("elaborate", parents=[common], help="print declarations with sugar expanded")
    e.add_argument("files", nargs="+")
    v = sub.add_parser("eval", parents=[common], help="evaluate a closed term in the configured model")
    v.add_argument("term")
    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("suite", choices=SUITES + ["all"])
    s.add_argument("--n", type=int, default=2, help="arity for the algop suite")
    return p


def _opt(args, name: str, default):
    return getattr(args, name, default)


def load_config(args) -> fm.ModelConfig:
    cfg = fm.ModelConfig()
    if _opt(args, "config", None):
        cfg = fm.ModelConfig.from_json(Path(args.config).read_text())
    updates = {}
    if _opt(args, "monad", None) is not None:
        updates["monad"] = args.monad
    if _opt(args, "exceptions", None) is not None:
        updates["exceptions"] = tuple(x for x in args.exceptions.split(",") if x)
    if _opt(args, "bound", None) is not None:
        updates["bound"] = args.bound
    if _opt(args, "include_free_algebras", None):
        updates["include_free_algebras"] = True
    if updates:
        from dataclasses import replace

        cfg = replace(cfg, **updates)
    return cfg


# ---------------------------------------------------------------------------
# check / elaborate


def process_file(path: str, constants, abbrevs: dict, out: list) -> list[dict]:
    """Check one file's declarations; returns error records."""
    errors = []
    try:
        decls = surface.parse_file(Path(path).read_text(), path)
    except surface.SyntaxErr as exc:
        return [{"code": "SyntaxError", "span": str(exc.span), "detail": exc.message}]
    for decl in decls:
        try:
            if isinstance(decl, surface.TypeDecl):
                ty = enc.elaborate_type(decl.ty, abbrevs)
                abbrevs[decl.name] = ty
                out.append((decl.name, "type", ty, None))
                continue
            ty = enc.elaborate_type(decl.ty, abbrevs)
            term = enc.elaborate_term(decl.term, constants=constants, abbrevs=abbrevs)
            checked = tc.typecheck(Judgment((), None, term, ty), constants)
            out.append((decl.name, "def", checked, term))
        except tc.TypingError as exc:
            errors.append({"code": exc.code.value, "span": str(decl.span), "detail": exc.detail})
        except (enc.EncodingError, enc.PositivityError, surface.SyntaxErr) as exc:
            errors.append({"code": "ElaborationError", "span": str(decl.span), "detail": str(exc)})
    return errors


def cmd_check(args) -> int:
    cfg = load_config(args)
    monad = cfg.monad_spec()
    constants = enc.constants_table(
        enc.register_effect_constants(cfg.monad, monad.exceptions)
    )
    status = 0
    for path in args.files:
        abbrevs: dict = {}
        out: list = []
        errors = process_file(path, constants, abbrevs, out)
        if errors:
            status = 1
        if _opt(args, "format", "text") == "json":
            print(json.dumps({"file": path, "errors": errors, "checked": len(out)}, sort_keys=True))
        else:
            for err in errors:
                print(f"{err['span']}: {err['code']}: {err['detail']}")
            print(f"{path}: {len(out)} declaration(s) checked, {len(errors)} error(s)")
    return status


def cmd_elaborate(args) -> int:
    cfg = load_config(args)
    monad = cfg.monad_spec()
    constants = enc.constants_table(
        enc.register_effect_constants(cfg.monad, monad.exceptions)
    )
    status = 0
    for path in args.files:
        abbrevs: dict = {}
        out: list = []
        errors = process_file(path, constants, abbrevs, out)
        if errors:
            status = 1
            for err in errors:
                print(f"{err['span']}: {err['code']}: {err['detail']}")
        for name, kind, ty, term in out:
            if kind == "type":
                print(f"type {name} = {surface.print_type(ty)}")
            else:
                print(f"def {name} : {surface.print_type(ty)} = {surface.print_term(term)}")
    return status


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args) -> int:
    cfg = load_config(args)
    model = pl.build_model(cfg)
    constants = model.constant_schemes
    try:
        term = surface.parse_term(args.term)
        term = enc.elaborate_term(term, constants=constants)
        j = Judgment((), None, term)
        ty = tc.typecheck(j, constants)
        sem = model.interp_vtype(ip.TypeEnv(), ty)
        val = model.interp_term(j, ip.Env())
    except surface.SyntaxErr as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except tc.TypingError as exc:
        print(exc.to_json() if _opt(args, "format", "text") == "json" else str(exc), file=sys.stderr)
        return 1
    except ip.OutOfBoundError as exc:
        print(f"out of bound: {exc}", file=sys.stderr)
        return 3
    if _opt(args, "format", "text") == "json":
        print(json.dumps({
            "type": surface.print_type(ty),
            "set": ip.semset_to_json(model, sem),
            "value": ip.decode_value(model, sem, val).to_json(),
        }, sort_keys=True))
    else:
        print(f"type:  {surface.print_type(ty)}")
        decoded = json.dumps(ip.decode_value(model, sem, val).to_json())
        print(f"value: {decoded} (index {val} of {sem.size})")
    return 0


# ---------------------------------------------------------------------------
# verify


def run_suite(name: str, cfg: fm.ModelConfig, seed: int, n: int = 2) -> list[pl.VerificationReport]:
    if name == "typing":
        return [pl.verify_typing_corpus()]
    if name == "metatheory":
        return [pl.verify_metatheory(seed)]
    if name == "monad-laws":
        return [pl.verify_monad_laws(4)]
    if name == "rel-axioms":
        return [pl.verify_rel_axioms(pl.build_model(cfg, force_free=False))]
    if name == "identity-extension":
        return [pl.verify_identity_extension(pl.build_model(cfg, force_free=False))]
    if name == "abstraction":
        return [pl.verify_abstraction(pl.build_model(cfg, force_free=False), seed=seed)]
    if name == "bang-laws":
        return [pl.verify_bang_laws(pl.build_model(cfg, force_free=True))]
    if name == "free-algebra":
        model = pl.build_model(cfg, force_free=True)
        return [pl.verify_free_algebra(model), pl.free_algebra_negative_control(model)]
    if name == "bang-cardinality":
        reports = [pl.verify_bang_cardinality(pl.build_model(cfg, force_free=True))]
        id_cfg = fm.ModelConfig("identity", (), cfg.bound, True)
        reports.append(pl.verify_bang_cardinality(pl.build_model(id_cfg), sizes=(1, 2)))
        return reports
    if name == "rel-lifting":
        return [pl.verify_rel_lifting(pl.build_model(cfg, force_free=True))]
    if name == "algop":
        model = pl.build_model(cfg, force_free=False)
        model.register_free_algebra(fm.FinSet(n))
        return [pl.verify_algop_correspondence(model, n)]
    if name == "handler":
        return [pl.verify_handler(pl.build_model(cfg, force_free=True))]
    if name == "encoding-props":
        return [pl.verify_encoding_props(pl.build_model(cfg, force_free=True))]
    if name == "parametric-counts":
        free = pl.build_model(cfg, force_free=True)
        plain = pl.build_model(cfg, force_free=False)
        return [pl.verify_parametric_counts(free, plain)]
    if name == "cbpv":
        return [pl.verify_cbpv()]
    raise ValueError(f"unknown suite {name!r}")


def cmd_verify(args) -> int:
    cfg = load_config(args)
    suites = SUITES if args.suite == "all" else [args.suite]
    status = 0
    for name in suites:
        try:
            reports = run_suite(name, cfg, _opt(args, "seed", 2024), _opt(args, "n", 2))
        except (ip.OutOfBoundError, fm.ModelError) as exc:
            print(f"{name}: out-of-bound: {exc}", file=sys.stderr)
            status = max(status, 3)
            continue
        for rep in reports:
            expected_negative = rep.theorem_id.endswith("negative-control")
            if _opt(args, "format", "text") == "json":
                print(rep.to_json(include_runtime=False))
            else:
                line = f"{rep.theorem_id}: {rep.status}"
                if rep.counts:
                    line += f" {rep.counts}"
                line += f" [{rep.runtime_ms:.0f} ms]"
                print(line)
                if rep.status == "counterexample" and not expected_negative:
                    print(f"  witness: {rep.witness}")
            if expected_negative:
                if rep.status != "counterexample":
                    status = max(status, 1)
                continue
            if rep.status == "counterexample":
                status = max(status, 1)
            elif rep.status == "out-of-bound":
                status = max(status, 3)
    return status


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "check":
            return cmd_check(args)
        if args.command == "elaborate":
            return cmd_elaborate(args)
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "verify":
            return cmd_verify(args)
    except fm.ModelError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
