"""Exact algebra over finite discrete joint distributions.

Probabilities are rationals end to end; independence and uniformity are
decided by exact equality, never by tolerance. Floating point appears only
in advisory diagnostics (mutual information).
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

Assignment = tuple[str, ...]


class SchemaError(ValueError):
    """Unknown variable name, overlapping roles, or mismatched domains."""


@dataclass(frozen=True)
class VarSchema:
    name: str
    domain: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        if not self.domain:
            raise SchemaError(f"variable {self.name} has empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise SchemaError(f"variable {self.name} has duplicate domain values")


@dataclass(frozen=True)
class JointTable:
    """Exact joint distribution; absent cells have probability zero."""

    schema: tuple[VarSchema, ...]
    cells: Mapping[Assignment, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "schema", tuple(self.schema))
        names = [v.name for v in self.schema]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate variable names in schema: {names}")
        clean: dict[Assignment, Fraction] = {}
        for key, prob in self.cells.items():
            key = tuple(key)
            if len(key) != len(self.schema):
                raise SchemaError(f"cell {key} does not match schema arity")
            for value, var in zip(key, self.schema):
                if value not in var.domain:
                    raise SchemaError(f"value {value!r} not in domain of {var.name}")
            prob = Fraction(prob)
            if prob < 0:
                raise SchemaError(f"negative probability at {key}")
            if prob > 0:
                clean[key] = clean.get(key, Fraction(0)) + prob
        if sum(clean.values(), Fraction(0)) != 1:
            raise SchemaError(
                f"cell probabilities sum to {sum(clean.values(), Fraction(0))}, not 1"
            )
        object.__setattr__(self, "cells", clean)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.schema)

    def var(self, name: str) -> VarSchema:
        for v in self.schema:
            if v.name == name:
                return v
        raise SchemaError(f"unknown variable {name!r}")

    def index(self, name: str) -> int:
        for i, v in enumerate(self.schema):
            if v.name == name:
                return i
        raise SchemaError(f"unknown variable {name!r}")

    def prob(self, assignment: Mapping[str, str]) -> Fraction:
        key = tuple(assignment[v.name] for v in self.schema)
        return self.cells.get(key, Fraction(0))

    def sorted_cells(self) -> list[tuple[Assignment, Fraction]]:
        """Cells in lexicographic domain-index order (zero cells omitted)."""
        ranks = [{value: i for i, value in enumerate(v.domain)} for v in self.schema]
        return sorted(
            self.cells.items(),
            key=lambda item: tuple(r[v] for r, v in zip(ranks, item[0])),
        )


@dataclass(frozen=True)
class ConditionalTable:
    target: tuple[VarSchema, ...]
    given: tuple[VarSchema, ...]
    rows: Mapping[Assignment, Mapping[Assignment, Fraction]]

    def __post_init__(self):
        for given_key, row in self.rows.items():
            if sum(row.values(), Fraction(0)) != 1:
                raise SchemaError(f"conditional row for {given_key} does not sum to 1")


def marginalize(j: JointTable, keep: Iterable[str]) -> JointTable:
    keep = list(keep)
    indices = [j.index(name) for name in keep]
    cells: dict[Assignment, Fraction] = {}
    for key, prob in j.cells.items():
        sub = tuple(key[i] for i in indices)
        cells[sub] = cells.get(sub, Fraction(0)) + prob
    schema = tuple(j.schema[i] for i in indices)
    return JointTable(schema=schema, cells=cells)


def condition(j: JointTable, target: Iterable[str], given: Iterable[str]) -> ConditionalTable:
    target = list(target)
    given = list(given)
    overlap = set(target) & set(given)
    if overlap:
        raise SchemaError(f"target and given overlap: {sorted(overlap)}")
    t_idx = [j.index(name) for name in target]
    g_idx = [j.index(name) for name in given]
    joint_rows: dict[Assignment, dict[Assignment, Fraction]] = {}
    g_mass: dict[Assignment, Fraction] = {}
    for key, prob in j.cells.items():
        g_key = tuple(key[i] for i in g_idx)
        t_key = tuple(key[i] for i in t_idx)
        row = joint_rows.setdefault(g_key, {})
        row[t_key] = row.get(t_key, Fraction(0)) + prob
        g_mass[g_key] = g_mass.get(g_key, Fraction(0)) + prob
    rows = {
        g_key: {t_key: p / g_mass[g_key] for t_key, p in row.items()}
        for g_key, row in joint_rows.items()
    }
    return ConditionalTable(
        target=tuple(j.schema[i] for i in t_idx),
        given=tuple(j.schema[i] for i in g_idx),
        rows=rows,
    )


def distribution(j: JointTable, name: str) -> dict[str, Fraction]:
    """Marginal of one variable as a full-domain mapping (zeros included)."""
    m = marginalize(j, [name])
    domain = j.var(name).domain
    return {value: m.cells.get((value,), Fraction(0)) for value in domain}


def is_independent(
    j: JointTable, a: str, b: str
) -> tuple[bool, Optional[tuple[tuple[str, str], Fraction]]]:
    """Exact pairwise independence; on failure, the max-deviation cell.

    Ties in |P(a,b) - P(a)P(b)| break toward earlier domain order.
    """
    if a == b:
        raise SchemaError("independence requires two distinct variables")
    pair = marginalize(j, [a, b])
    pa = distribution(j, a)
    pb = distribution(j, b)
    best: Optional[tuple[tuple[str, str], Fraction]] = None
    for va in j.var(a).domain:
        for vb in j.var(b).domain:
            deviation = abs(pair.cells.get((va, vb), Fraction(0)) - pa[va] * pb[vb])
            if deviation > 0 and (best is None or deviation > best[1]):
                best = ((va, vb), deviation)
    return (best is None, best)


def is_uniform_conditional(
    c: ConditionalTable,
) -> tuple[bool, Optional[tuple[Assignment, dict[Assignment, Fraction]]]]:
    """True iff every row is exactly uniform over the full target domain."""
    if len(c.target) != 1:
        raise SchemaError("uniformity check requires a single target variable")
    domain = c.target[0].domain
    uniform = Fraction(1, len(domain))
    for g_key in sorted(c.rows, key=lambda k: tuple(k)):
        row = c.rows[g_key]
        full = {(value,): row.get((value,), Fraction(0)) for value in domain}
        if any(p != uniform for p in full.values()):
            return (False, (g_key, full))
    return (True, None)


def mutual_information(j: JointTable, a: str, b: str) -> float:
    """Plug-in mutual information in bits; exactly 0.0 under exact independence."""
    independent, _ = is_independent(j, a, b)
    if independent:
        return 0.0
    pair = marginalize(j, [a, b])
    pa = distribution(j, a)
    pb = distribution(j, b)
    mi = 0.0
    for (va, vb), p in pair.cells.items():
        mi += float(p) * math.log2(float(p) / float(pa[va] * pb[vb]))
    return mi


def total_variation(p: Mapping, q: Mapping) -> Fraction:
    if set(p) != set(q):
        raise SchemaError("total variation requires identical domains")
    return sum((abs(Fraction(p[k]) - Fraction(q[k])) for k in p), Fraction(0)) / 2


def to_csv(j: JointTable) -> str:
    """Full cartesian product, one row per cell, probabilities as p/q strings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([v.name for v in j.schema] + ["prob"])
    for key in itertools.product(*(v.domain for v in j.schema)):
        writer.writerow(list(key) + [str(j.cells.get(key, Fraction(0)))])
    return buf.getvalue()


def from_csv(text: str) -> JointTable:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if not header or header[-1] != "prob":
        raise SchemaError("joint-table CSV must end with a `prob` column")
    names = header[:-1]
    domains: list[dict[str, None]] = [{} for _ in names]
    cells: dict[Assignment, Fraction] = {}
    for row in reader:
        if not row:
            continue
        key = tuple(row[:-1])
        for value, domain in zip(key, domains):
            domain.setdefault(value, None)
        prob = Fraction(row[-1])
        if prob > 0:
            cells[key] = cells.get(key, Fraction(0)) + prob
    schema = tuple(
        VarSchema(name, tuple(domain)) for name, domain in zip(names, domains)
    )
    return JointTable(schema=schema, cells=cells)
