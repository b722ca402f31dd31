"""Model config files: grammar, span bindings, and mechanisms in one file.

Layout (`#` starts a comment anywhere):

    [grammar]
    # inline grammar DSL, or a single `file = path` line (relative to the
    # config file)
    S -> A B : 1
    A -> 'left' : 1
    B -> 'right' : 1

    [spans]
    # ordered; several slot nonterminals may share one variable
    x1 = A
    x2 = B

    [mechanism y]
    parents = x1 x2
    outputs = Yes No
    # rows: 'parent values' -> outputs : probs, or 'parent values' -> value
    'left' 'right' -> Yes
    'left' 'other' -> Yes No : 1/2 1/2

    [interventions]
    # optional explicit intervention domains
    x2 = 'right' 'other'
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .grammar import parse_grammar
from .scm import CausalModel, Mechanism, ModelError, ScmSpec, SpanVar

_SECTION_RE = re.compile(r"^\[(?P<name>[^\]]+)\]$")
_TOKEN_RE = re.compile(r"\s*(?:'(?P<quoted>[^']*)'|(?P<bare>[^\s']+))")


class ModelFileError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(message + (f" (line {line})" if line is not None else ""))


def _tokens(text: str, lineno: int) -> list[str]:
    out = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise ModelFileError(f"bad token at {text[pos:]!r}", line=lineno)
        out.append(match.group("quoted") if match.group("quoted") is not None else match.group("bare"))
        pos = match.end()
    return out


def parse_model_file(text: str, base_dir: Optional[Path] = None) -> CausalModel:
    sections: list[tuple[str, list[tuple[int, str]]]] = []
    current: Optional[list[tuple[int, str]]] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = _SECTION_RE.match(line)
        if header:
            current = []
            sections.append((header.group("name").strip(), current))
            continue
        if current is None:
            raise ModelFileError(f"content before first section: {line!r}", line=lineno)
        current.append((lineno, line))

    names = [name for name, _ in sections]
    if "grammar" not in names or "spans" not in names:
        raise ModelFileError("model file needs [grammar] and [spans] sections")

    grammar = None
    span_vars: list[SpanVar] = []
    mechanisms: list[Mechanism] = []
    domains: dict[str, tuple[str, ...]] = {}

    for name, lines in sections:
        if name == "grammar":
            grammar = _parse_grammar_section(lines, base_dir)
        elif name == "spans":
            for lineno, line in lines:
                var, slots = _split_assignment(line, lineno)
                span_vars.append(SpanVar(var, tuple(_tokens(slots, lineno))))
        elif name.startswith("mechanism"):
            mech_name = name[len("mechanism"):].strip()
            if not mech_name:
                raise ModelFileError("mechanism section needs a name: [mechanism y]")
            mechanisms.append(_parse_mechanism(mech_name, lines))
        elif name == "interventions":
            for lineno, line in lines:
                var, values = _split_assignment(line, lineno)
                domains[var] = tuple(_tokens(values, lineno))
        else:
            raise ModelFileError(f"unknown section [{name}]")

    model = CausalModel(
        grammar=grammar,
        scm=ScmSpec(span_vars=tuple(span_vars), mechanisms=tuple(mechanisms)),
        intervention_domains=domains or None,
    )
    model.validate()
    return model


def load_model_file(path: Path) -> CausalModel:
    path = Path(path)
    return parse_model_file(path.read_text(encoding="utf-8"), base_dir=path.parent)


def _split_assignment(line: str, lineno: int) -> tuple[str, str]:
    if "=" not in line:
        raise ModelFileError(f"expected `name = ...`, got {line!r}", line=lineno)
    key, _, value = line.partition("=")
    return key.strip(), value.strip()


def _parse_grammar_section(lines, base_dir):
    if len(lines) == 1 and lines[0][1].replace(" ", "").startswith("file="):
        _, path = _split_assignment(lines[0][1], lines[0][0])
        full = Path(path) if base_dir is None else Path(base_dir) / path
        return parse_grammar(full.read_text(encoding="utf-8"))
    return parse_grammar("\n".join(line for _, line in lines))


def _parse_mechanism(name: str, lines) -> Mechanism:
    parents: Optional[tuple[str, ...]] = None
    outputs: Optional[tuple[str, ...]] = None
    rows: dict[tuple[str, ...], tuple[Fraction, ...]] = {}
    row_lines = []
    for lineno, line in lines:
        if "->" in line:
            row_lines.append((lineno, line))
        else:
            key, value = _split_assignment(line, lineno)
            if key == "parents":
                parents = tuple(_tokens(value, lineno))
            elif key == "outputs":
                outputs = tuple(_tokens(value, lineno))
            else:
                raise ModelFileError(f"unknown mechanism key {key!r}", line=lineno)
    if parents is None or outputs is None:
        raise ModelFileError(f"mechanism {name} needs `parents =` and `outputs =` lines")
    for lineno, line in row_lines:
        lhs, _, rhs = line.partition("->")
        key = tuple(_tokens(lhs.strip(), lineno))
        if ":" in rhs:
            values_part, _, probs_part = rhs.partition(":")
            values = _tokens(values_part.strip(), lineno)
            probs = {v: Fraction(p) for v, p in zip(values, probs_part.split())}
            if len(probs) != len(values):
                raise ModelFileError("row values and probabilities differ in count", line=lineno)
            row = tuple(probs.get(out, Fraction(0)) for out in outputs)
        else:
            value = rhs.strip().strip("'")
            if value not in outputs:
                raise ModelFileError(f"row output {value!r} not in outputs", line=lineno)
            row = tuple(Fraction(1) if out == value else Fraction(0) for out in outputs)
        rows[key] = row
    try:
        return Mechanism(name=name, parents=parents, outputs=outputs, table=rows)
    except ModelError as exc:
        raise ModelFileError(str(exc)) from None
