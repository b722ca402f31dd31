"""Structural causal layer over a PCFG.

Text is generated by the grammar; span variables are the yields of designated
slot nonterminals; label variables are produced by tabular mechanisms reading
only span variables, each consuming one Uniform(0,1) noise value by inverse
CDF over the mechanism's output order. Interventions surgically replace a
span value; counterfactuals keep a unit's noise fixed and re-apply the
mechanisms (abduction-action-prediction).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Optional, Sequence, Union

from .dists import JointTable, VarSchema
from .grammar import Derivation, NoiseStream, Pcfg, replay_yields, sample_derivation

Noise = Union[Fraction, float]


class ModelError(ValueError):
    """Ill-formed SCM declaration or out-of-domain intervention."""


@dataclass(frozen=True)
class Mechanism:
    """Conditional probability table from span-variable parents to one label."""

    name: str
    parents: tuple[str, ...]
    outputs: tuple[str, ...]
    table: Mapping[tuple[str, ...], tuple[Fraction, ...]]

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        clean: dict[tuple[str, ...], tuple[Fraction, ...]] = {}
        for key, row in self.table.items():
            key = tuple(key)
            row = tuple(Fraction(p) for p in row)
            if len(key) != len(self.parents):
                raise ModelError(f"mechanism {self.name}: row key {key} has wrong arity")
            if len(row) != len(self.outputs):
                raise ModelError(f"mechanism {self.name}: row for {key} has wrong width")
            if any(p < 0 for p in row) or sum(row, Fraction(0)) != 1:
                raise ModelError(f"mechanism {self.name}: row for {key} does not sum to 1")
            clean[key] = row
        object.__setattr__(self, "table", clean)

    @classmethod
    def deterministic(
        cls,
        name: str,
        parents: Sequence[str],
        outputs: Sequence[str],
        mapping: Mapping[tuple[str, ...], str],
    ) -> "Mechanism":
        outputs = tuple(outputs)
        table = {
            key: tuple(Fraction(1) if out == value else Fraction(0) for out in outputs)
            for key, value in mapping.items()
        }
        return cls(name=name, parents=parents, outputs=outputs, table=table)

    def row(self, parent_values: tuple[str, ...]) -> tuple[Fraction, ...]:
        try:
            return self.table[tuple(parent_values)]
        except KeyError:
            raise ModelError(
                f"mechanism {self.name} has no row for parents {parent_values}"
            ) from None

    def apply(self, parent_values: tuple[str, ...], noise: Noise) -> str:
        """Inverse-CDF selection over output order, half-open intervals."""
        row = self.row(parent_values)
        cumulative = Fraction(0)
        for value, p in zip(self.outputs, row):
            cumulative += p
            if noise < cumulative:
                return value
        return self.outputs[-1]


@dataclass(frozen=True)
class SpanVar:
    """A span variable bound to the yield of exactly one slot nonterminal.

    Several nonterminals may fill the same slot (e.g. one per label-linked
    alternative); each derivation must use exactly one of them.
    """

    name: str
    slots: tuple[str, ...]

    def __post_init__(self):
        slots = (self.slots,) if isinstance(self.slots, str) else tuple(self.slots)
        object.__setattr__(self, "slots", slots)


@dataclass(frozen=True)
class ScmSpec:
    span_vars: tuple[SpanVar, ...]
    mechanisms: tuple[Mechanism, ...]

    def __post_init__(self):
        object.__setattr__(self, "span_vars", tuple(self.span_vars))
        object.__setattr__(self, "mechanisms", tuple(self.mechanisms))
        span_names = {v.name for v in self.span_vars}
        names = [v.name for v in self.span_vars] + [m.name for m in self.mechanisms]
        if len(set(names)) != len(names):
            raise ModelError(f"duplicate variable names: {names}")
        for m in self.mechanisms:
            missing = set(m.parents) - span_names
            if missing:
                raise ModelError(
                    f"mechanism {m.name} reads undeclared span variables {sorted(missing)}"
                )

    @property
    def span_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.span_vars)

    @property
    def label_names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.mechanisms)

    def mechanism(self, label: str) -> Mechanism:
        for m in self.mechanisms:
            if m.name == label:
                return m
        raise ModelError(f"unknown label variable {label!r}")


def extract_spans(g: Pcfg, d: Derivation, spec: ScmSpec) -> dict[str, str]:
    """Bind each span variable to the space-joined yield of its slot subtree."""
    yields = replay_yields(g, d)
    spans: dict[str, str] = {}
    for var in spec.span_vars:
        hits = [leaves for nt, leaves in yields if nt in var.slots]
        if len(hits) != 1:
            raise ModelError(
                f"span variable {var.name}: expected exactly one of {var.slots} "
                f"in the derivation, found {len(hits)}"
            )
        spans[var.name] = " ".join(hits[0])
    return spans


@dataclass(frozen=True)
class Intervention:
    target: str
    value: str

    def __str__(self) -> str:
        return f"do({self.target}:={self.value!r})"


@dataclass(frozen=True)
class Unit:
    """One exogenous-noise realization: the object counterfactuals act on."""

    derivation: Derivation
    mechanism_noise: Mapping[str, Noise]
    spans: Mapping[str, str]
    labels: Mapping[str, str]


@dataclass(frozen=True)
class CfOutcome:
    spans: Mapping[str, str]
    labels: Mapping[str, str]


@dataclass
class CausalModel:
    """A grammar plus its causal layer, with cached exact enumeration.

    `intervention_domains` optionally widens a span variable's intervention
    values beyond what the grammar can currently produce; every reading
    mechanism must still have a row for each value.
    """

    grammar: Pcfg
    scm: ScmSpec
    intervention_domains: Optional[Mapping[str, tuple[str, ...]]] = None

    @cached_property
    def derivations(self) -> list[tuple[Derivation, Fraction]]:
        return enumerate_model(self.grammar)

    @cached_property
    def outcomes(self) -> list[tuple[Derivation, Fraction, dict[str, str]]]:
        """Every positive-probability derivation with its span assignment."""
        return [
            (d, p, extract_spans(self.grammar, d, self.scm)) for d, p in self.derivations
        ]

    def span_domain(self, name: str) -> tuple[str, ...]:
        """Intervention values for a span variable.

        Defaults to the grammar-producible values in enumeration order unless
        an explicit domain was declared.
        """
        if name not in self.scm.span_names:
            raise ModelError(f"unknown span variable {name!r}")
        if self.intervention_domains and name in self.intervention_domains:
            return tuple(self.intervention_domains[name])
        seen: dict[str, None] = {}
        for _, _, spans in self.outcomes:
            seen.setdefault(spans[name], None)
        return tuple(seen)

    def validate(self) -> None:
        """Raise ModelError unless spans and mechanism rows are well formed."""
        self.grammar.check()
        order = {name: i for i, name in enumerate(self.scm.span_names)}
        for d, _, spans in self.outcomes:
            yields = replay_yields(self.grammar, d)
            positions = {}
            for var in self.scm.span_vars:
                positions[var.name] = next(
                    i for i, (nt, _) in enumerate(yields) if nt in var.slots
                )
            ranked = sorted(positions, key=positions.get)
            if [order[n] for n in ranked] != sorted(order[n] for n in ranked):
                raise ModelError(
                    f"span variables occur out of declaration order: {ranked}"
                )
        for m in self.scm.mechanisms:
            for values in self._parent_combinations(m):
                m.row(values)

    def _parent_combinations(self, m: Mechanism) -> list[tuple[str, ...]]:
        combos: list[tuple[str, ...]] = [()]
        for parent in m.parents:
            domain = self.span_domain(parent)
            combos = [c + (v,) for c in combos for v in domain]
        return combos


def enumerate_model(g: Pcfg):
    from .grammar import enumerate_derivations

    return enumerate_derivations(g)


def apply_mechanisms(
    spec: ScmSpec, spans: Mapping[str, str], noise: Mapping[str, Noise]
) -> dict[str, str]:
    labels: dict[str, str] = {}
    for m in spec.mechanisms:
        parent_values = tuple(spans[p] for p in m.parents)
        labels[m.name] = m.apply(parent_values, noise[m.name])
    return labels


def generate_unit(model: CausalModel, noise: NoiseStream) -> Unit:
    """Sample a derivation, then one noise value per mechanism, in order."""
    d = sample_derivation(model.grammar, noise)
    spans = extract_spans(model.grammar, d, model.scm)
    mech_noise = {m.name: noise.draw() for m in model.scm.mechanisms}
    labels = apply_mechanisms(model.scm, spans, mech_noise)
    return Unit(derivation=d, mechanism_noise=mech_noise, spans=spans, labels=labels)


def counterfactual(model: CausalModel, unit: Unit, i: Intervention) -> CfOutcome:
    """Re-evaluate the unit's labels with the target span surgically replaced."""
    if i.target not in model.scm.span_names:
        raise ModelError(f"interventions apply to span variables, not {i.target!r}")
    spans = dict(unit.spans)
    spans[i.target] = i.value
    labels = apply_mechanisms(model.scm, spans, unit.mechanism_noise)
    return CfOutcome(spans=spans, labels=labels)


def model_joint(model: CausalModel) -> JointTable:
    """Exact observational joint over span and label variables."""
    model.validate()
    schema = [
        VarSchema(v.name, model.span_domain(v.name)) for v in model.scm.span_vars
    ] + [VarSchema(m.name, m.outputs) for m in model.scm.mechanisms]
    cells: dict[tuple[str, ...], Fraction] = {}

    def label_weights(spans, mechs) -> list[tuple[tuple[str, ...], Fraction]]:
        combos: list[tuple[tuple[str, ...], Fraction]] = [((), Fraction(1))]
        for m in mechs:
            row = m.row(tuple(spans[p] for p in m.parents))
            combos = [
                (vals + (out,), w * p)
                for vals, w in combos
                for out, p in zip(m.outputs, row)
                if p > 0
            ]
        return combos

    for _, p, spans in model.outcomes:
        base = tuple(spans[v.name] for v in model.scm.span_vars)
        for labels, w in label_weights(spans, model.scm.mechanisms):
            key = base + labels
            cells[key] = cells.get(key, Fraction(0)) + p * w
    return JointTable(schema=tuple(schema), cells=cells)


def _conditioned(
    weighted: list[tuple[dict[str, str], Fraction]],
    condition_on: Optional[Mapping[str, str]],
) -> list[tuple[dict[str, str], Fraction]]:
    if not condition_on:
        return weighted
    kept = [
        (spans, p)
        for spans, p in weighted
        if all(spans[k] == v for k, v in condition_on.items())
    ]
    mass = sum((p for _, p in kept), Fraction(0))
    if mass == 0:
        raise ModelError(f"conditioning set {dict(condition_on)} has probability zero")
    return [(spans, p / mass) for spans, p in kept]


def interventional_distribution(
    model: CausalModel,
    label: str,
    i: Intervention,
    condition_on: Optional[Mapping[str, str]] = None,
) -> dict[str, Fraction]:
    """P(label | do(target:=value), condition_on) by truncated factorization.

    The span joint keeps its pre-intervention factor over the other spans
    with the target clamped; conditioning (if any) is applied to the
    post-intervention distribution.
    """
    m = model.scm.mechanism(label)
    weighted = [(dict(spans, **{i.target: i.value}), p) for _, p, spans in model.outcomes]
    weighted = _conditioned(weighted, condition_on)
    dist = {out: Fraction(0) for out in m.outputs}
    for spans, p in weighted:
        row = m.row(tuple(spans[parent] for parent in m.parents))
        for out, q in zip(m.outputs, row):
            dist[out] += p * q
    return dist


def counterfactual_aggregate(
    model: CausalModel,
    label: str,
    i: Intervention,
    condition_on: Optional[Mapping[str, str]] = None,
) -> dict[str, Fraction]:
    """The same interventional distribution via unit-level counterfactuals.

    Aggregates counterfactual() over every positive-probability derivation
    and every noise cell, weighting by derivation probability times noise
    measure. Must agree exactly with interventional_distribution.
    """
    m = model.scm.mechanism(label)
    base_noise = {name: Fraction(0) for name in model.scm.label_names}
    kept = []
    for d, p, spans in model.outcomes:
        cf_spans = dict(spans, **{i.target: i.value})
        if condition_on and any(cf_spans[k] != v for k, v in condition_on.items()):
            continue
        kept.append((d, p, spans, cf_spans))
    mass = sum((p for _, p, _, _ in kept), Fraction(0))
    if mass == 0:
        raise ModelError(f"conditioning set {dict(condition_on or {})} has probability zero")

    dist = {out: Fraction(0) for out in m.outputs}
    for d, p, spans, cf_spans in kept:
        row = m.row(tuple(cf_spans[parent] for parent in m.parents))
        for lo, hi in _noise_cells(row):
            noise = dict(base_noise, **{label: (lo + hi) / 2})
            unit = Unit(
                derivation=d,
                mechanism_noise=noise,
                spans=spans,
                labels=apply_mechanisms(model.scm, spans, noise),
            )
            outcome = counterfactual(model, unit, i)
            dist[outcome.labels[label]] += (p / mass) * (hi - lo)
    return dist


def _noise_cells(row: tuple[Fraction, ...]) -> list[tuple[Fraction, Fraction]]:
    """Partition [0,1) into the inverse-CDF cells of one mechanism row."""
    cells = []
    cumulative = Fraction(0)
    for p in row:
        if p > 0:
            cells.append((cumulative, cumulative + p))
        cumulative += p
    return cells


@dataclass(frozen=True)
class CiWitness:
    unit: Unit
    intervention: Intervention
    factual_label: str
    counterfactual_label: str


@dataclass(frozen=True)
class CiResult:
    feature: str
    label: str
    invariant: bool
    witness: Optional[CiWitness] = None


def is_counterfactually_invariant(
    model: CausalModel, feature: str, label: str
) -> CiResult:
    """Decide counterfactual invariance of a label to a span variable.

    Invariant iff for every positive-probability derivation and every
    intervention value in the feature's domain, the mechanism row at the
    intervened parents equals the row at the factual parents; under the
    shared inverse-CDF noise coupling, row equality is equivalent to equal
    outputs for all noise values. Returns the lexicographically first
    witness (derivation enumeration order, then domain order) otherwise.
    """
    m = model.scm.mechanism(label)
    if feature not in model.scm.span_names:
        raise ModelError(f"unknown span variable {feature!r}")
    if feature not in m.parents:
        return CiResult(feature=feature, label=label, invariant=True)
    for d, _, spans in model.outcomes:
        factual_row = m.row(tuple(spans[p] for p in m.parents))
        for value in model.span_domain(feature):
            intervened = dict(spans, **{feature: value})
            cf_row = m.row(tuple(intervened[p] for p in m.parents))
            if cf_row == factual_row:
                continue
            u = _separating_noise(m, factual_row, cf_row)
            noise = {name: Fraction(0) for name in model.scm.label_names}
            noise[label] = u
            unit = Unit(
                derivation=d,
                mechanism_noise=noise,
                spans=spans,
                labels=apply_mechanisms(model.scm, spans, noise),
            )
            i = Intervention(target=feature, value=value)
            outcome = counterfactual(model, unit, i)
            return CiResult(
                feature=feature,
                label=label,
                invariant=False,
                witness=CiWitness(
                    unit=unit,
                    intervention=i,
                    factual_label=unit.labels[label],
                    counterfactual_label=outcome.labels[label],
                ),
            )
    return CiResult(feature=feature, label=label, invariant=True)


def _separating_noise(
    m: Mechanism, row_a: tuple[Fraction, ...], row_b: tuple[Fraction, ...]
) -> Fraction:
    """A noise value at which the two rows' inverse CDFs pick different outputs."""
    points = sorted({Fraction(0), Fraction(1)}
                    | {sum(row_a[: i + 1], Fraction(0)) for i in range(len(row_a))}
                    | {sum(row_b[: i + 1], Fraction(0)) for i in range(len(row_b))})
    for lo, hi in zip(points, points[1:]):
        u = (lo + hi) / 2
        if _pick(m.outputs, row_a, u) != _pick(m.outputs, row_b, u):
            return u
    raise ModelError("rows differ but no separating noise value found")


def _pick(outputs: tuple[str, ...], row: tuple[Fraction, ...], u: Fraction) -> str:
    cumulative = Fraction(0)
    for value, p in zip(outputs, row):
        cumulative += p
        if u < cumulative:
            return value
    return outputs[-1]
