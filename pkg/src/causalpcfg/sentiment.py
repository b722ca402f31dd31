"""Built-in toy targeted-sentiment model.

Sentences have the form (x1, x2, x3): a target noun phrase, a copula, and a
predicative adjectival phrase. The top-level rule couples the target and the
sentiment branch with strength alpha; beta_plus and beta_minus control how
often each sentiment branch uses a negated copula. The label mechanisms are
deterministic: z names the target, y is positive exactly when the copula and
adjective polarities agree.

Top-level rule probabilities, in declaration order:

    S -> TargetPizza SentPos   (1 + alpha) / 4
    S -> TargetSushi SentNeg   (1 + alpha) / 4
    S -> TargetPizza SentNeg   (1 - alpha) / 4
    S -> TargetSushi SentPos   (1 - alpha) / 4

    SentPos -> CopPos AdjPos   beta_plus
    SentPos -> CopNeg AdjNeg   1 - beta_plus
    SentNeg -> CopPos AdjNeg   beta_minus
    SentNeg -> CopNeg AdjPos   1 - beta_minus

Rules whose probability is zero at the given parameters are omitted, since
productions must have positive probability. Intervention domains always cover
the full lexicon, so counterfactual verdicts do not change at degenerate
parameter values where part of the lexicon becomes unproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .grammar import NT, Pcfg, Production, T
from .scm import CausalModel, Mechanism, ModelError, ScmSpec, SpanVar

Rational = Union[Fraction, int, str]

POS, NEG = "Pos", "Neg"
PIZZA, SUSHI = "Pizza", "Sushi"


@dataclass(frozen=True)
class Lexicon:
    """Surface strings per slot polarity; supports must be pairwise disjoint."""

    pizza: tuple[str, ...] = ("the pizza",)
    sushi: tuple[str, ...] = ("the sushi",)
    cop_pos: tuple[str, ...] = ("was",)
    cop_neg: tuple[str, ...] = ("was not",)
    adj_pos: tuple[str, ...] = ("delicious",)
    adj_neg: tuple[str, ...] = ("greasy",)

    def __post_init__(self):
        for pair in [
            ("pizza", "sushi"),
            ("cop_pos", "cop_neg"),
            ("adj_pos", "adj_neg"),
        ]:
            a, b = (getattr(self, name) for name in pair)
            if not a or not b:
                raise ModelError(f"lexicon slots {pair} must be nonempty")
            if set(a) & set(b):
                raise ModelError(
                    f"lexicon supports for {pair} overlap: {sorted(set(a) & set(b))}"
                )


MINIMAL_LEXICON = Lexicon()

RICH_LEXICON = Lexicon(
    pizza=("the pizza",),
    sushi=("the sushi",),
    cop_pos=("is", "was", "is universally agreed to be"),
    cop_neg=("isn't", "wasn't", "was the furthest possible thing from"),
    adj_pos=("great", "delicious"),
    adj_neg=("disappointing", "totally unappetizing"),
)

LEXICONS = {"minimal": MINIMAL_LEXICON, "rich": RICH_LEXICON}

_SLOT_NONTERMINALS = {
    "TargetPizza": "pizza",
    "TargetSushi": "sushi",
    "CopPos": "cop_pos",
    "CopNeg": "cop_neg",
    "AdjPos": "adj_pos",
    "AdjNeg": "adj_neg",
}


def _coerce(name: str, value: Rational, lo: int, hi: int) -> Fraction:
    value = Fraction(value)
    if not lo <= value <= hi:
        raise ModelError(f"{name} must be in [{lo}, {hi}], got {value}")
    return value


def sentiment_grammar(
    alpha: Rational,
    beta_plus: Rational,
    beta_minus: Rational,
    lexicon: Lexicon = MINIMAL_LEXICON,
) -> Pcfg:
    alpha = _coerce("alpha", alpha, -1, 1)
    beta_plus = _coerce("beta_plus", beta_plus, 0, 1)
    beta_minus = _coerce("beta_minus", beta_minus, 0, 1)

    rows = [
        ("S", ("TargetPizza", "SentPos"), (1 + alpha) / 4),
        ("S", ("TargetSushi", "SentNeg"), (1 + alpha) / 4),
        ("S", ("TargetPizza", "SentNeg"), (1 - alpha) / 4),
        ("S", ("TargetSushi", "SentPos"), (1 - alpha) / 4),
        ("SentPos", ("CopPos", "AdjPos"), beta_plus),
        ("SentPos", ("CopNeg", "AdjNeg"), 1 - beta_plus),
        ("SentNeg", ("CopPos", "AdjNeg"), beta_minus),
        ("SentNeg", ("CopNeg", "AdjPos"), 1 - beta_minus),
    ]
    productions = [
        Production(lhs, tuple(NT(n) for n in rhs), prob)
        for lhs, rhs, prob in rows
        if prob > 0
    ]
    for nonterminal, slot in _SLOT_NONTERMINALS.items():
        words = getattr(lexicon, slot)
        share = Fraction(1, len(words))
        for word in words:
            productions.append(Production(nonterminal, (T(word),), share))
    return Pcfg(start="S", productions=tuple(productions))


def sentiment_scm(lexicon: Lexicon = MINIMAL_LEXICON) -> ScmSpec:
    f_z = Mechanism.deterministic(
        "z",
        parents=("x1",),
        outputs=(PIZZA, SUSHI),
        mapping={
            **{(w,): PIZZA for w in lexicon.pizza},
            **{(w,): SUSHI for w in lexicon.sushi},
        },
    )
    cops = [(w, +1) for w in lexicon.cop_pos] + [(w, -1) for w in lexicon.cop_neg]
    adjs = [(w, +1) for w in lexicon.adj_pos] + [(w, -1) for w in lexicon.adj_neg]
    f_y = Mechanism.deterministic(
        "y",
        parents=("x2", "x3"),
        outputs=(POS, NEG),
        mapping={
            (cop, adj): POS if cop_sign * adj_sign > 0 else NEG
            for (cop, cop_sign), (adj, adj_sign) in itertools.product(cops, adjs)
        },
    )
    return ScmSpec(
        span_vars=(
            SpanVar("x1", ("TargetPizza", "TargetSushi")),
            SpanVar("x2", ("CopPos", "CopNeg")),
            SpanVar("x3", ("AdjPos", "AdjNeg")),
        ),
        mechanisms=(f_y, f_z),
    )


@dataclass(frozen=True)
class SentimentParams:
    alpha: Fraction
    beta_plus: Fraction
    beta_minus: Fraction


def sentiment_model(
    alpha: Rational,
    beta_plus: Rational,
    beta_minus: Rational,
    lexicon: Lexicon = MINIMAL_LEXICON,
) -> CausalModel:
    """The full toy model: grammar, causal layer, full-lexicon interventions."""
    grammar = sentiment_grammar(alpha, beta_plus, beta_minus, lexicon)
    domains = {
        "x1": lexicon.pizza + lexicon.sushi,
        "x2": lexicon.cop_pos + lexicon.cop_neg,
        "x3": lexicon.adj_pos + lexicon.adj_neg,
    }
    model = CausalModel(
        grammar=grammar, scm=sentiment_scm(lexicon), intervention_domains=domains
    )
    model.validate()
    return model
