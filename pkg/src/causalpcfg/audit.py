"""Informativeness and invariance audits.

Exact verdicts: marginal feature-label informativeness under either the
independence or the uniformity criterion, counterfactual-invariance verdicts,
the quadrant cross-classification of the two, witness pairs of feature
values with differing conditional label distributions, and full parameter
sweeps of the built-in sentiment model with closed-form predictions.

Empirical side: seeded dataset generation (JSONL) and chi-square / mutual
information audits of sampled corpora.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from scipy.special import gammaincc

from . import dists
from .dists import JointTable
from .grammar import NoiseStream
from .scm import CausalModel, CiResult, is_counterfactually_invariant, model_joint
from .scm import generate_unit
from .sentiment import Rational, sentiment_model

INDEPENDENCE = "independence"
UNIFORMITY = "uniformity"

# Shipped seed for reproducible empirical audits.
DEFAULT_SEED = 7

# Feature-label pairs with a closed-form independence condition in the
# sentiment model; (x2, z) and (x3, z) are omitted from sweeps because their
# status varies with alpha and has no single-parameter condition.
SWEEP_PAIRS = (("x1", "y"), ("x2", "y"), ("x3", "y"), ("x1", "z"))


@dataclass(frozen=True)
class UifVerdict:
    feature: str
    label: str
    definition: str
    satisfied: bool
    mi_bits: float
    max_tv: Fraction
    witness_pair: Optional[tuple[str, str, Fraction]] = None


@dataclass(frozen=True)
class QuadrantEntry:
    feature: str
    label: str
    uif_satisfied: bool
    ci_invariant: bool

    @property
    def classification(self) -> str:
        if self.uif_satisfied:
            return "fully-clean" if self.ci_invariant else "hidden-causal"
        return "spurious-in-causal-sense" if self.ci_invariant else "causal-informative"


@dataclass(frozen=True)
class QuadrantReport:
    entries: tuple[QuadrantEntry, ...]

    def entry(self, feature: str, label: str) -> QuadrantEntry:
        for e in self.entries:
            if (e.feature, e.label) == (feature, label):
                return e
        raise KeyError((feature, label))


@dataclass(frozen=True)
class SweepRow:
    alpha: Fraction
    beta_plus: Fraction
    beta_minus: Fraction
    independent: Mapping[tuple[str, str], bool]
    predicted: Mapping[tuple[str, str], bool]
    ci_invariant: Mapping[tuple[str, str], bool]

    @property
    def matches(self) -> bool:
        return dict(self.independent) == dict(self.predicted)


def feature_label_pairs(model: CausalModel) -> list[tuple[str, str]]:
    return [
        (feature, label)
        for feature in model.scm.span_names
        for label in model.scm.label_names
    ]


def uif_report(
    model: CausalModel, definition: str = INDEPENDENCE, joint: Optional[JointTable] = None
) -> list[UifVerdict]:
    if definition not in (INDEPENDENCE, UNIFORMITY):
        raise ValueError(f"unknown definition {definition!r}")
    joint = joint if joint is not None else model_joint(model)
    verdicts = []
    for feature, label in feature_label_pairs(model):
        independent, _ = dists.is_independent(joint, feature, label)
        if definition == INDEPENDENCE:
            satisfied = independent
        else:
            uniform, _ = dists.is_uniform_conditional(
                dists.condition(joint, [label], [feature])
            )
            satisfied = uniform
        try:
            pairs = uif_witness_pairs(model, feature, label, joint=joint)
        except ValueError:
            pairs = []  # single-valued feature: independent, no pairs to rank
        max_tv = pairs[0][2] if pairs else Fraction(0)
        verdicts.append(
            UifVerdict(
                feature=feature,
                label=label,
                definition=definition,
                satisfied=satisfied,
                mi_bits=dists.mutual_information(joint, feature, label),
                max_tv=max_tv,
                witness_pair=pairs[0] if not satisfied and pairs else None,
            )
        )
    return verdicts


def uif_witness_pairs(
    model: CausalModel,
    feature: str,
    label: str,
    joint: Optional[JointTable] = None,
) -> list[tuple[str, str, Fraction]]:
    """Value pairs whose conditional label distributions differ, TV-descending.

    Only feature values with positive marginal probability participate; ties
    in TV preserve domain order.
    """
    joint = joint if joint is not None else model_joint(model)
    conditional = dists.condition(joint, [label], [feature])
    domain = joint.var(feature).domain
    label_domain = joint.var(label).domain
    present = [v for v in domain if (v,) in conditional.rows]
    if len(present) < 2:
        raise ValueError(
            f"witness pairs need at least two positive-probability values of {feature}"
        )
    rows = {
        v: {out: conditional.rows[(v,)].get((out,), Fraction(0)) for out in label_domain}
        for v in present
    }
    pairs = []
    for a, b in itertools.combinations(present, 2):
        tv = dists.total_variation(rows[a], rows[b])
        if tv > 0:
            pairs.append((a, b, tv))
    return sorted(pairs, key=lambda p: (-p[2], present.index(p[0]), present.index(p[1])))


def ci_report(model: CausalModel) -> list[CiResult]:
    return [
        is_counterfactually_invariant(model, feature, label)
        for feature, label in feature_label_pairs(model)
    ]


def quadrant_report(model: CausalModel) -> QuadrantReport:
    joint = model_joint(model)
    uif = {(v.feature, v.label): v for v in uif_report(model, joint=joint)}
    ci = {(r.feature, r.label): r for r in ci_report(model)}
    entries = tuple(
        QuadrantEntry(
            feature=feature,
            label=label,
            uif_satisfied=uif[feature, label].satisfied,
            ci_invariant=ci[feature, label].invariant,
        )
        for feature, label in feature_label_pairs(model)
    )
    return QuadrantReport(entries=entries)


def predicted_independence(
    alpha: Fraction, beta_plus: Fraction, beta_minus: Fraction
) -> dict[tuple[str, str], bool]:
    """Closed-form independence conditions for the sentiment model."""
    return {
        ("x1", "y"): alpha == 0,
        ("x2", "y"): beta_plus == beta_minus,
        ("x3", "y"): beta_plus == 1 - beta_minus,
        ("x1", "z"): False,
    }


def sweep(
    alpha_grid: Sequence[Rational],
    beta_plus_grid: Sequence[Rational],
    beta_minus_grid: Sequence[Rational],
    lexicon=None,
) -> list[SweepRow]:
    from .sentiment import MINIMAL_LEXICON

    lexicon = lexicon or MINIMAL_LEXICON
    rows = []
    for a, bp, bm in itertools.product(alpha_grid, beta_plus_grid, beta_minus_grid):
        a, bp, bm = Fraction(a), Fraction(bp), Fraction(bm)
        model = sentiment_model(a, bp, bm, lexicon)
        joint = model_joint(model)
        independent = {
            pair: dists.is_independent(joint, *pair)[0] for pair in SWEEP_PAIRS
        }
        ci = {
            pair: is_counterfactually_invariant(model, *pair).invariant
            for pair in SWEEP_PAIRS
        }
        rows.append(
            SweepRow(
                alpha=a,
                beta_plus=bp,
                beta_minus=bm,
                independent=independent,
                predicted=predicted_independence(a, bp, bm),
                ci_invariant=ci,
            )
        )
    return rows


def generate_dataset(model: CausalModel, n: int, seed: int) -> list[dict[str, str]]:
    """n records from the model, deterministic given the seed."""
    if n < 1:
        raise ValueError("n must be at least 1")
    noise = NoiseStream.seeded(seed)
    records = []
    for _ in range(n):
        unit = generate_unit(model, noise)
        record = dict(unit.spans)
        record.update(unit.labels)
        records.append(record)
    return records


def write_jsonl(records: Iterable[Mapping[str, str]]) -> str:
    return "".join(json.dumps(dict(r), sort_keys=False) + "\n" for r in records)


def read_jsonl(text: str) -> list[dict[str, str]]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


@dataclass(frozen=True)
class EmpiricalAudit:
    feature: str
    label: str
    n: int
    contingency: Mapping[tuple[str, str], int]
    chi2: float
    dof: int
    p_value: float
    mi_bits: float
    low_expected_counts: bool


def empirical_audit(
    records: Sequence[Mapping[str, str]], feature: str, label: str
) -> EmpiricalAudit:
    """Pearson chi-square independence test plus plug-in MI on a sample."""
    for field in (feature, label):
        if any(field not in r for r in records):
            raise ValueError(f"field {field!r} missing from some records")
    counts = Counter((r[feature], r[label]) for r in records)
    n = len(records)
    row_totals = Counter()
    col_totals = Counter()
    for (a, b), c in counts.items():
        row_totals[a] += c
        col_totals[b] += c
    if len(row_totals) < 2 or len(col_totals) < 2:
        raise ValueError(
            f"chi-square needs at least two observed values of {feature} and {label}"
        )
    chi2 = 0.0
    mi = 0.0
    low = False
    for a in row_totals:
        for b in col_totals:
            expected = row_totals[a] * col_totals[b] / n
            observed = counts.get((a, b), 0)
            if expected < 5:
                low = True
            chi2 += (observed - expected) ** 2 / expected
            if observed:
                mi += (observed / n) * math.log2(observed * n / (row_totals[a] * col_totals[b]))
    dof = (len(row_totals) - 1) * (len(col_totals) - 1)
    # Survival function of the chi-square distribution: the regularized
    # upper incomplete gamma function Q(dof/2, chi2/2).
    p_value = float(gammaincc(dof / 2, chi2 / 2))
    return EmpiricalAudit(
        feature=feature,
        label=label,
        n=n,
        contingency=dict(counts),
        chi2=chi2,
        dof=dof,
        p_value=p_value,
        mi_bits=mi,
        low_expected_counts=low,
    )
