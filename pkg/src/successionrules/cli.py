"""Command-line front end.

Exit status: 0 success, 1 usage or input error, 2 positivity test
inconclusive (``positivity`` only), 3 stage/oracle mismatch (``verify`` only).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import compiler
from .dsl import load_rule, print_rule
from .numseq import Recurrence, eval_sequence, generating_function
from .parametric import ParametricRule, expand_parametric
from .rulecore import RuleError, SuccessionRule, classify, is_consistent
from .treeengine import NodeBudgetExceeded, expand, export_dot

DEFAULT_DEPTH_CAP = 64
STAGES = ("extended", "jumpfree", "ordinary", "generic")

EXIT_OK, EXIT_USAGE, EXIT_UNKNOWN, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2, which means "inconclusive" here
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _init_policy(text: str) -> Optional[list[int]]:
    return None if text.strip().lower() == "default" else _int_list(text)


@dataclass
class JobSpec:
    command: str
    coeffs: Optional[list[int]] = None
    inits: Optional[list[int]] = None
    depth: Optional[int] = None
    rule_path: Optional[str] = None
    q: Optional[list[int]] = None
    stage: Optional[str] = None
    json: bool = False
    compact: bool = False
    out: Optional[str] = None
    max_nodes: int = 5000
    labels: bool = False

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "JobSpec":
        job = cls(
            command=ns.command,
            coeffs=getattr(ns, "coeffs", None),
            inits=getattr(ns, "init", None),
            depth=getattr(ns, "depth", None),
            rule_path=getattr(ns, "rule", None),
            q=getattr(ns, "q", None),
            stage=getattr(ns, "stage", None),
            json=ns.json,
            compact=getattr(ns, "compact", False),
            out=getattr(ns, "out", None),
            max_nodes=getattr(ns, "max_nodes", 5000),
            labels=getattr(ns, "labels", False),
        )
        takes_rule = job.command in ("expand", "dot")
        if takes_rule and (job.coeffs is None) == (job.rule_path is None):
            raise UsageError(f"{job.command}: give exactly one of --coeffs or --rule")
        if not takes_rule and job.coeffs is None:
            raise UsageError(f"{job.command}: --coeffs is required")
        if job.depth is not None:
            if job.depth < 0:
                raise UsageError("--depth must be non-negative")
            if job.depth > ns.max_depth:
                raise UsageError(f"--depth {job.depth} exceeds the cap {ns.max_depth} (raise it with --max-depth)")
        return job

    def recurrence(self) -> Recurrence:
        return Recurrence(tuple(self.coeffs), None if self.inits is None else tuple(self.inits))

    def inputs(self) -> dict:
        out: dict = {}
        if self.coeffs is not None:
            out["coeffs"] = self.coeffs
            out["init"] = "default" if self.inits is None else self.inits
        for key in ("rule_path", "stage", "depth", "q"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="successionrules", description="Compile C-finite recurrences into succession rules.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, coeffs=True, depth=None, rule=False):
        if coeffs:
            p.add_argument("--coeffs", type=_int_list, help="a_1,...,a_k (use --coeffs=-1,2 for a leading minus)")
            p.add_argument("--init", type=_init_policy, default=None, help="'default' or h_1,...,h_{k-1}")
        if rule:
            p.add_argument("--rule", help="rule file in the succession-rule DSL")
        if depth is not None:
            p.add_argument("--depth", type=int, default=depth)
        p.add_argument("--max-depth", type=int, default=DEFAULT_DEPTH_CAP, help="depth cap (default %(default)s)")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    common(sub.add_parser("seq", help="terms of the recurrence"), depth=10)
    common(sub.add_parser("gf", help="rational generating function"))
    p = sub.add_parser("compile", help="emit a rule in the DSL")
    common(p)
    p.add_argument("--stage", choices=STAGES, default="ordinary")
    p.add_argument("--q", type=_int_list, help="explicit q_2,...,q_k for the ordinary stage")
    common(sub.add_parser("positivity", help="search for a positivity witness"))
    p = sub.add_parser("expand", help="level totals of a rule")
    common(p, depth=10, rule=True)
    p.add_argument("--stage", choices=STAGES, default="ordinary")
    p.add_argument("--q", type=_int_list)
    p.add_argument("--labels", action="store_true", help="also print per-label signed counts")
    common(sub.add_parser("verify", help="check every stage against the recurrence"), depth=15)
    p = sub.add_parser("dot", help="DOT drawing of the generating tree")
    common(p, depth=3, rule=True)
    p.add_argument("--stage", choices=STAGES, default="ordinary")
    p.add_argument("--q", type=_int_list)
    p.add_argument("--compact", action="store_true", help="one node per label and level")
    p.add_argument("--out", help="write DOT here instead of standard output")
    p.add_argument("--max-nodes", type=int, default=5000)
    return parser


def _compile_stage(job: JobSpec, diagnostics: list[str]) -> SuccessionRule:
    rec = job.recurrence()
    stage = job.stage or "ordinary"
    if stage == "extended":
        return compiler.to_extended_rule(rec)
    if stage == "jumpfree":
        return compiler.eliminate_jumps(rec)
    if stage == "generic" or not rec.is_default:
        if job.q is not None:
            qr = compiler.qr_for(rec.coeffs, job.q)
            witness = compiler.PositivityWitness(qr, tuple(compiler.slack_for(rec.coeffs, qr.q)))
            if min(witness.slack) < 0:
                raise compiler.CoreNotPositive(f"q={job.q} violates the positivity system")
            return compiler.compile_generic(rec, witness)
        return compiler.compile_generic(rec)
    if job.q is not None:
        qr = compiler.qr_for(rec.coeffs, job.q)
    else:
        witness = compiler.positivity_check(rec)
        qr = witness.qr if witness is not None else None
        if witness is None:
            diagnostics.append("positivity test inconclusive; using the minimal q decomposition")
    comp = compiler.to_ordinary_rule(rec, qr)
    if not comp.ordinary:
        diagnostics.append(
            "not ordinary: negative exponents "
            + ", ".join(f"{lab}:{m}" for lab, m in comp.negative)
        )
    return comp.rule


def _source_rule(job: JobSpec, diagnostics: list[str]):
    if job.rule_path is not None:
        return load_rule(Path(job.rule_path).read_text(encoding="utf-8"))
    return _compile_stage(job, diagnostics)


def _run(job: JobSpec, out: TextIO) -> tuple[int, object, list[str], list[str]]:
    """Returns (status, json result, human lines, diagnostics)."""
    diagnostics: list[str] = []
    cmd = job.command
    if cmd == "seq":
        terms = eval_sequence(job.recurrence(), job.depth)
        return EXIT_OK, {"terms": terms}, [", ".join(map(str, terms))], diagnostics

    if cmd == "gf":
        gf = generating_function(job.recurrence())
        res = {"numerator": list(gf.numerator), "denominator": list(gf.denominator), "text": str(gf)}
        return EXIT_OK, res, [str(gf)], diagnostics

    if cmd == "compile":
        rule = _compile_stage(job, diagnostics)
        text = print_rule(rule)
        res = {
            "stage": job.stage,
            "kind": classify(rule).value,
            "consistent": bool(is_consistent(rule)),
            "rule": text,
        }
        return EXIT_OK, res, [text.rstrip("\n")], diagnostics

    if cmd == "positivity":
        rec = job.recurrence()
        if not rec.is_default:
            raise UsageError("positivity: the test applies to default initial conditions")
        w = compiler.positivity_check(rec)
        if w is None:
            return EXIT_UNKNOWN, {"status": "unknown"}, ["unknown"], diagnostics
        res = {"status": "witness", "q": list(w.qr.q), "r": list(w.qr.r), "slack": list(w.slack)}
        lines = [
            "witness",
            "q = " + ",".join(map(str, w.qr.q)),
            "r = " + ",".join(map(str, w.qr.r)),
            "slack = " + ",".join(map(str, w.slack)),
        ]
        return EXIT_OK, res, lines, diagnostics

    if cmd == "expand":
        rule = _source_rule(job, diagnostics)
        if isinstance(rule, ParametricRule):
            profiles = expand_parametric(rule, job.depth)
        else:
            profiles = expand(rule, job.depth)
        levels = [
            {
                "level": p.level,
                "total": p.total,
                "labels": {str(lab): c for lab, c in p.signed_counts.items()},
            }
            for p in profiles
        ]
        lines = []
        for lv in levels:
            line = f"{lv['level']} {lv['total']}"
            if job.labels:
                line += "  " + " ".join(f"{lab}:{c}" for lab, c in lv["labels"].items())
            lines.append(line)
        res = {"totals": [p.total for p in profiles], "levels": levels}
        return EXIT_OK, res, lines, diagnostics

    if cmd == "verify":
        report = compiler.verify(job.recurrence(), job.depth)
        stages = []
        lines = []
        for s in report.stages:
            stages.append(
                {
                    "stage": s.stage,
                    "applicable": s.applicable,
                    "matches": s.matches,
                    "first_divergence": list(s.first_divergence) if s.first_divergence else None,
                    "note": s.note,
                }
            )
            if not s.applicable:
                lines.append(f"{s.stage:<9} skipped ({s.note})")
            elif s.matches:
                lines.append(f"{s.stage:<9} match")
            else:
                n, x, y = s.first_divergence
                lines.append(f"{s.stage:<9} MISMATCH at level {n}: expected {x}, got {y}")
        lines.append("all stages match" if report.all_match else "verification failed")
        res = {"expected": report.expected, "all_match": report.all_match, "stages": stages}
        return (EXIT_OK if report.all_match else EXIT_MISMATCH), res, lines, diagnostics

    if cmd == "dot":
        rule = _source_rule(job, diagnostics)
        if isinstance(rule, ParametricRule):
            raise UsageError("dot: parametric rules cannot be drawn; compile a finite rule first")
        text = export_dot(rule, job.depth, compact=job.compact, max_nodes=job.max_nodes)
        if job.out:
            Path(job.out).write_text(text, encoding="utf-8")
            return EXIT_OK, {"out": job.out}, [], diagnostics
        return EXIT_OK, {"dot": text}, [text.rstrip("\n")], diagnostics

    raise UsageError(f"unknown command {cmd!r}")


def run(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        job = JobSpec.from_args(ns)
        status, result, lines, diagnostics = _run(job, out)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except (RuleError, compiler.CompileError, NodeBudgetExceeded, ValueError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    if job.json:
        doc = {"command": job.command, "inputs": job.inputs(), "result": result, "diagnostics": diagnostics}
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        for line in lines:
            out.write(line + "\n")
        for d in diagnostics:
            print(f"note: {d}", file=err)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
