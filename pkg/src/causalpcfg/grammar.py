"""Finite probabilistic context-free grammars with exact rational probabilities.

Rule probabilities are `fractions.Fraction` throughout, so enumeration and
all downstream distribution algebra are exact. Recursion is rejected: the
nonterminal reachability graph must be acyclic so that the derivation set is
finite and probabilities sum to exactly 1.

Rule declaration order is semantic: sampling maps a uniform noise value to a
rule by inverse CDF over the rules in declaration order, so reordering rules
changes which noise values select which expansion.
"""

from __future__ import annotations

import graphlib
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union


class GrammarError(ValueError):
    """Invalid grammar text or structure."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)


class NoiseExhausted(RuntimeError):
    """A finite noise stream ran out before the derivation completed."""


@dataclass(frozen=True)
class Symbol:
    name: str
    terminal: bool

    def __post_init__(self):
        if not self.name:
            raise GrammarError("symbol names must be nonempty")


def T(name: str) -> Symbol:
    return Symbol(name, terminal=True)


def NT(name: str) -> Symbol:
    return Symbol(name, terminal=False)


@dataclass(frozen=True)
class Production:
    lhs: str
    rhs: tuple[Symbol, ...]
    prob: Fraction

    def __post_init__(self):
        object.__setattr__(self, "prob", Fraction(self.prob))
        object.__setattr__(self, "rhs", tuple(self.rhs))
        if not self.rhs:
            raise GrammarError(f"production for {self.lhs} has empty right-hand side")
        if not 0 < self.prob <= 1:
            raise GrammarError(
                f"production for {self.lhs} has probability {self.prob}, must be in (0, 1]"
            )


@dataclass(frozen=True)
class Pcfg:
    start: str
    productions: tuple[Production, ...]

    def __post_init__(self):
        object.__setattr__(self, "productions", tuple(self.productions))

    def rules_for(self, nonterminal: str) -> tuple[Production, ...]:
        return tuple(p for p in self.productions if p.lhs == nonterminal)

    @property
    def nonterminals(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for p in self.productions:
            seen.setdefault(p.lhs, None)
            for s in p.rhs:
                if not s.terminal:
                    seen.setdefault(s.name, None)
        return tuple(seen)

    @property
    def terminals(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for p in self.productions:
            for s in p.rhs:
                if s.terminal:
                    seen.setdefault(s.name, None)
        return tuple(seen)

    def check(self) -> None:
        """Raise GrammarError unless the grammar passes full validation."""
        report = validate(self)
        if not report.ok:
            raise GrammarError("; ".join(report.errors))


@dataclass(frozen=True)
class ValidationReport:
    rule_sums: dict[str, Fraction]
    reachable: tuple[str, ...]
    unreachable: tuple[str, ...]
    cycle: tuple[str, ...]
    errors: tuple[str, ...]
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.errors


def _reachable(g: Pcfg) -> tuple[str, ...]:
    rules: dict[str, list[Production]] = {}
    for p in g.productions:
        rules.setdefault(p.lhs, []).append(p)
    seen: dict[str, None] = {g.start: None}
    frontier = [g.start]
    while frontier:
        nt = frontier.pop()
        for p in rules.get(nt, ()):
            for s in p.rhs:
                if not s.terminal and s.name not in seen:
                    seen[s.name] = None
                    frontier.append(s.name)
    return tuple(seen)


def validate(g: Pcfg) -> ValidationReport:
    errors: list[str] = []
    warnings: list[str] = []

    nts = set(g.nonterminals)
    clash = nts & set(g.terminals)
    if clash:
        errors.append(f"names used as both terminal and nonterminal: {sorted(clash)}")

    rule_sums: dict[str, Fraction] = {}
    for p in g.productions:
        rule_sums[p.lhs] = rule_sums.get(p.lhs, Fraction(0)) + p.prob
    for nt, total in rule_sums.items():
        if total != 1:
            errors.append(f"probabilities for {nt} sum to {total}, not 1")

    reachable = _reachable(g)
    for nt in reachable:
        if nt not in rule_sums:
            errors.append(f"nonterminal {nt} is reachable but has no productions")
    unreachable = tuple(nt for nt in g.nonterminals if nt not in set(reachable))
    for nt in unreachable:
        warnings.append(f"nonterminal {nt} is unreachable from {g.start}")

    cycle: tuple[str, ...] = ()
    sorter = graphlib.TopologicalSorter(
        {
            nt: {s.name for p in g.productions if p.lhs == nt for s in p.rhs if not s.terminal}
            for nt in g.nonterminals
        }
    )
    try:
        sorter.prepare()
    except graphlib.CycleError as exc:
        cycle = tuple(exc.args[1])
        errors.append(f"cycle detected: {' -> '.join(cycle)}")

    return ValidationReport(
        rule_sums=rule_sums,
        reachable=reachable,
        unreachable=unreachable,
        cycle=cycle,
        errors=tuple(errors),
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class Derivation:
    """A complete leftmost derivation: the rule chosen at each expansion site."""

    choices: tuple[Production, ...]
    terminals: tuple[str, ...]

    @property
    def text(self) -> str:
        return " ".join(self.terminals)


def enumerate_derivations(g: Pcfg) -> list[tuple[Derivation, Fraction]]:
    """All derivations from the start symbol with their exact probabilities.

    Output order is lexicographic in site-wise rule indices (leftmost site
    most significant), so it is identical across runs.
    """
    g.check()
    cache: dict[str, list[tuple[tuple[Production, ...], Fraction, tuple[str, ...]]]] = {}

    def expand(nt: str) -> list[tuple[tuple[Production, ...], Fraction, tuple[str, ...]]]:
        if nt in cache:
            return cache[nt]
        out = []
        for prod in g.rules_for(nt):
            partial: list[tuple[tuple[Production, ...], Fraction, tuple[str, ...]]] = [
                ((prod,), prod.prob, ())
            ]
            for sym in prod.rhs:
                if sym.terminal:
                    partial = [(ch, p, leaves + (sym.name,)) for ch, p, leaves in partial]
                else:
                    sub = expand(sym.name)
                    partial = [
                        (ch + sch, p * sp, leaves + sleaves)
                        for ch, p, leaves in partial
                        for sch, sp, sleaves in sub
                    ]
            out.extend(partial)
        cache[nt] = out
        return out

    return [
        (Derivation(choices=ch, terminals=leaves), p) for ch, p, leaves in expand(g.start)
    ]


def replay_yields(g: Pcfg, d: Derivation) -> list[tuple[str, tuple[str, ...]]]:
    """Replay a derivation and return every (nonterminal, subtree yield) pair.

    Pairs appear in leftmost-expansion order; a nonterminal occurring at
    several sites contributes one pair per site.
    """
    it = iter(d.choices)
    spans: list[tuple[str, tuple[str, ...]]] = []

    def expand(nt: str) -> tuple[str, ...]:
        try:
            prod = next(it)
        except StopIteration:
            raise GrammarError(f"derivation ended while expanding {nt}") from None
        if prod.lhs != nt:
            raise GrammarError(f"derivation chooses a {prod.lhs} rule at a {nt} site")
        index = len(spans)
        spans.append((nt, ()))  # placeholder keeps leftmost order
        leaves: tuple[str, ...] = ()
        for sym in prod.rhs:
            leaves += (sym.name,) if sym.terminal else expand(sym.name)
        spans[index] = (nt, leaves)
        return leaves

    terminals = expand(g.start)
    if next(it, None) is not None:
        raise GrammarError("derivation has trailing rule choices")
    if terminals != d.terminals:
        raise GrammarError("derivation yield does not match its stored terminals")
    return spans


class NoiseStream:
    """Uniform-[0,1) values consumed one per expansion site in leftmost order.

    Values may be an explicit finite sequence (rationals, for replayable
    exactness) or an endless seeded pseudo-random source.
    """

    def __init__(self, values: Iterator[Union[Fraction, float]], finite: bool):
        self._values = values
        self._finite = finite

    @classmethod
    def from_values(cls, values: Sequence[Union[Fraction, float]]) -> "NoiseStream":
        vals = list(values)
        for v in vals:
            if not 0 <= v < 1:
                raise ValueError(f"noise value {v} outside [0, 1)")
        return cls(iter(vals), finite=True)

    @classmethod
    def seeded(cls, seed: int) -> "NoiseStream":
        rng = random.Random(seed)

        def gen() -> Iterator[float]:
            while True:
                yield rng.random()

        return cls(gen(), finite=False)

    def draw(self) -> Union[Fraction, float]:
        try:
            return next(self._values)
        except StopIteration:
            raise NoiseExhausted("noise stream exhausted before the derivation completed") from None


def sample_derivation(g: Pcfg, noise: NoiseStream) -> Derivation:
    """Sample one derivation, consuming one noise value per expansion site.

    At each site with noise value u, rule i is chosen when
    cumulative(i-1) <= u < cumulative(i) over the rules in declaration order.
    """
    choices: list[Production] = []
    terminals: list[str] = []

    def expand(nt: str) -> None:
        rules = g.rules_for(nt)
        if not rules:
            raise GrammarError(f"nonterminal {nt} has no productions")
        u = noise.draw()
        cumulative = Fraction(0)
        chosen = rules[-1]
        for prod in rules:
            cumulative += prod.prob
            if u < cumulative:
                chosen = prod
                break
        choices.append(chosen)
        for sym in chosen.rhs:
            if sym.terminal:
                terminals.append(sym.name)
            else:
                expand(sym.name)

    expand(g.start)
    return Derivation(choices=tuple(choices), terminals=tuple(terminals))


_RULE_RE = re.compile(
    r"^(?P<lhs>[A-Za-z_]\w*)\s*->\s*(?P<rhs>.*?)\s*:\s*(?P<prob>\d+\s*(?:/\s*\d+)?)$"
)
_RHS_TOKEN_RE = re.compile(r"\s*(?:'(?P<term>[^']*)'|(?P<nonterm>[A-Za-z_]\w*))")
_START_RE = re.compile(r"^start\s*:\s*(?P<name>[A-Za-z_]\w*)$")


def parse_grammar(text: str) -> Pcfg:
    """Parse the grammar DSL: one `LHS -> sym sym ... : p/q` per line.

    Terminals are single-quoted, `#` starts a comment, probabilities are
    integers or `p/q` rationals. The first production's left-hand side is the
    start symbol unless a `start:` header appears.
    """
    start: Optional[str] = None
    productions: list[Production] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = _START_RE.match(line)
        if header:
            if productions or start is not None:
                raise GrammarError("start: header must precede all productions", line=lineno)
            start = header.group("name")
            continue
        rule = _RULE_RE.match(line)
        if not rule:
            raise GrammarError(
                f"expected `LHS -> sym ... : p/q`, got {line!r}", line=lineno, column=1
            )
        rhs: list[Symbol] = []
        pos = 0
        rhs_text = rule.group("rhs")
        while pos < len(rhs_text):
            token = _RHS_TOKEN_RE.match(rhs_text, pos)
            if not token:
                raise GrammarError(
                    f"bad symbol at {rhs_text[pos:]!r}",
                    line=lineno,
                    column=rule.start("rhs") + pos + 1,
                )
            if token.group("term") is not None:
                rhs.append(T(token.group("term")))
            else:
                rhs.append(NT(token.group("nonterm")))
            pos = token.end()
        prob = Fraction(rule.group("prob").replace(" ", ""))
        try:
            productions.append(Production(rule.group("lhs"), tuple(rhs), prob))
        except GrammarError as exc:
            raise GrammarError(str(exc), line=lineno) from None
    if not productions:
        raise GrammarError("grammar has no productions")
    g = Pcfg(start=start or productions[0].lhs, productions=tuple(productions))
    g.check()
    return g


def format_grammar(g: Pcfg) -> str:
    """Render a grammar back to DSL text; parse_grammar round-trips it."""
    lines = [f"start: {g.start}"]
    for p in g.productions:
        rhs = " ".join(f"'{s.name}'" if s.terminal else s.name for s in p.rhs)
        lines.append(f"{p.lhs} -> {rhs} : {p.prob}")
    return "\n".join(lines) + "\n"
