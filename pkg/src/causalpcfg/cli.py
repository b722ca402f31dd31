"""Command-line interface.

Subcommands: exact, sweep, generate, audit, counterfactual, validate.
Model parameters on the command line are rationals written `p/q` (floats are
rejected to preserve exactness); sweep grids use `lo..hi/step`. Output is
byte-deterministic for a fixed command line and seed. Exit codes: 0 success,
1 validation or domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import audit as audit_mod
from . import dists, reports
from .grammar import GrammarError, validate as validate_grammar
from .modelfile import load_model_file
from .scm import CausalModel, Intervention, ModelError, Unit, apply_mechanisms
from .scm import counterfactual, model_joint
from .sentiment import LEXICONS, sentiment_model


def rational(text: str) -> Fraction:
    if "." in text or "e" in text.lower():
        raise argparse.ArgumentTypeError(
            f"{text!r}: write probabilities as rationals like 1/2, not floats"
        )
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"{text!r}: {exc}") from None


def grid(text: str) -> list[Fraction]:
    """`lo..hi/step`, a comma list, or a single rational."""
    if ".." in text:
        span, _, step = text.partition("/")
        lo_text, _, hi_text = span.partition("..")
        lo, hi = rational(lo_text), rational(hi_text)
        step = rational(step) if step else Fraction(1)
        if step <= 0 or hi < lo:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}")
        values = []
        v = lo
        while v <= hi:
            values.append(v)
            v += step
        return values
    if "," in text:
        return [rational(part) for part in text.split(",")]
    return [rational(text)]


def add_model_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--toy", action="store_true",
        help="built-in targeted-sentiment model (use --alpha/--beta-plus/--beta-minus)",
    )
    source.add_argument("--model", type=Path, help="model config file")
    parser.add_argument("--alpha", type=rational, default=Fraction(1, 2))
    parser.add_argument("--beta-plus", type=rational, default=Fraction(1, 2))
    parser.add_argument("--beta-minus", type=rational, default=Fraction(1, 2))
    parser.add_argument(
        "--lexicon", choices=sorted(LEXICONS), default="minimal",
        help="lexicon for the built-in model",
    )


def build_model(args: argparse.Namespace) -> CausalModel:
    if args.model is not None:
        return load_model_file(args.model)
    return sentiment_model(
        args.alpha, args.beta_plus, args.beta_minus, LEXICONS[args.lexicon]
    )


def emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def cmd_exact(args: argparse.Namespace) -> int:
    model = build_model(args)
    joint = model_joint(model)
    uif = audit_mod.uif_report(model, args.definition, joint=joint)
    ci = audit_mod.ci_report(model)
    quadrant = audit_mod.quadrant_report(model)
    if args.format == "json":
        doc = {
            "joint": [
                dict(zip(joint.names, key), prob=str(p)) for key, p in joint.sorted_cells()
            ],
            "uif": reports.jsonable(uif),
            "ci": reports.jsonable(ci),
            "quadrant": reports.jsonable(
                [
                    dict(reports.jsonable(e), classification=e.classification)
                    for e in quadrant.entries
                ]
            ),
        }
        emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        sections = [
            "joint distribution\n" + dists.to_csv(joint),
            "informativeness\n" + reports.uif_text(uif),
            "counterfactual invariance\n" + reports.ci_text(ci),
            "quadrants\n" + reports.quadrant_text(quadrant),
        ]
        emit("\n".join(sections), args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    rows = audit_mod.sweep(
        args.alpha, args.beta_plus, args.beta_minus, LEXICONS[args.lexicon]
    )
    if args.format == "json":
        emit(json.dumps(reports.jsonable(rows), indent=2) + "\n", args.out)
    else:
        emit(reports.sweep_csv(rows), args.out)
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    model = build_model(args)
    records = audit_mod.generate_dataset(model, args.count, args.seed)
    emit(audit_mod.write_jsonl(records), args.out)
    return 0


def cmd_audit(args: argparse.Namespace) -> int:
    if args.input is None or str(args.input) == "-":
        text = sys.stdin.read()
    else:
        text = Path(args.input).read_text(encoding="utf-8")
    records = audit_mod.read_jsonl(text)
    result = audit_mod.empirical_audit(records, args.feature, args.label)
    if args.format == "json":
        emit(json.dumps(reports.jsonable(result), indent=2) + "\n", args.out)
    else:
        emit(reports.empirical_text(result) + "\n", args.out)
    return 0


def parse_do(text: str) -> Intervention:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"{text!r}: expected var=value")
    target, _, value = text.partition("=")
    return Intervention(target=target.strip(), value=value.strip())


def cmd_counterfactual(args: argparse.Namespace) -> int:
    model = build_model(args)
    model.validate()
    intervention = args.do
    zero_noise = {name: Fraction(0) for name in model.scm.label_names}
    rows = []
    for d, p, spans in model.outcomes:
        unit = Unit(
            derivation=d,
            mechanism_noise=zero_noise,
            spans=spans,
            labels=apply_mechanisms(model.scm, spans, zero_noise),
        )
        outcome = counterfactual(model, unit, intervention)
        rows.append((p, spans, unit.labels, outcome.labels))
    if args.format == "json":
        doc = [
            {
                "prob": str(p),
                "factual": dict(spans, **labels),
                "counterfactual": dict(cf),
            }
            for p, spans, labels, cf in rows
        ]
        emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        span_names = list(model.scm.span_names)
        label_names = list(model.scm.label_names)
        header = ["prob"] + span_names + label_names + [f"cf_{n}" for n in label_names]
        table = [
            [str(p)] + [spans[n] for n in span_names]
            + [labels[n] for n in label_names] + [cf[n] for n in label_names]
            for p, spans, labels, cf in rows
        ]
        emit(f"{intervention}\n" + reports.render_table(header, table), args.out)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    model = build_model(args)
    report = validate_grammar(model.grammar)
    lines = ["grammar validation: " + ("ok" if report.ok else "FAIL")]
    for nt in sorted(report.rule_sums):
        lines.append(f"  {nt}: rule probabilities sum to {report.rule_sums[nt]}")
    for w in report.warnings:
        lines.append(f"  warning: {w}")
    for e in report.errors:
        lines.append(f"  error: {e}")
    if report.ok:
        model.validate()
        lines.append("causal layer validation: ok")
    emit("\n".join(lines) + "\n", args.out)
    return 0 if report.ok else 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalpcfg",
        description="Exact informativeness and counterfactual-invariance "
        "analysis of label-linked PCFGs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", type=Path, help="output file (default stdout)")
        p.add_argument("--format", choices=["json", "text", "csv"], default="text")

    p = sub.add_parser("exact", help="exact joint table and all reports")
    add_model_args(p)
    common(p)
    p.add_argument(
        "--definition", choices=["independence", "uniformity"], default="independence"
    )
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("sweep", help="parameter sweep of the built-in model")
    p.add_argument("--alpha", type=grid, default=grid("-1..1/1/2"))
    p.add_argument("--beta-plus", type=grid, default=grid("0..1/1/4"))
    p.add_argument("--beta-minus", type=grid, default=grid("0..1/1/4"))
    p.add_argument("--lexicon", choices=sorted(LEXICONS), default="minimal")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("generate", help="sample a JSONL dataset")
    add_model_args(p)
    common(p)
    p.add_argument("-n", "--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("audit", help="empirical independence audit of a dataset")
    p.add_argument("--input", help="JSONL file, or - for stdin")
    p.add_argument("--feature", required=True)
    p.add_argument("--label", required=True)
    common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("counterfactual", help="per-unit counterfactual table")
    add_model_args(p)
    common(p)
    p.add_argument("--do", type=parse_do, required=True, metavar="VAR=VALUE")
    p.set_defaults(func=cmd_counterfactual)

    p = sub.add_parser("validate", help="validate a model")
    add_model_args(p)
    common(p)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GrammarError, ModelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
