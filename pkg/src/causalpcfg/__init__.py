"""Exact analysis of label-linked PCFGs coupled to structural causal models."""

from .grammar import (
    Derivation,
    GrammarError,
    NoiseStream,
    Pcfg,
    Production,
    Symbol,
    NT,
    T,
    enumerate_derivations,
    format_grammar,
    parse_grammar,
    sample_derivation,
    validate,
)
from .dists import (
    ConditionalTable,
    JointTable,
    VarSchema,
    condition,
    distribution,
    is_independent,
    is_uniform_conditional,
    marginalize,
    mutual_information,
    total_variation,
)
from .scm import (
    CausalModel,
    CiResult,
    Intervention,
    Mechanism,
    ModelError,
    ScmSpec,
    SpanVar,
    Unit,
    counterfactual,
    counterfactual_aggregate,
    extract_spans,
    generate_unit,
    interventional_distribution,
    is_counterfactually_invariant,
    model_joint,
)
from .sentiment import (
    Lexicon,
    MINIMAL_LEXICON,
    RICH_LEXICON,
    sentiment_grammar,
    sentiment_model,
    sentiment_scm,
)
from .audit import (
    EmpiricalAudit,
    QuadrantReport,
    SweepRow,
    UifVerdict,
    ci_report,
    empirical_audit,
    generate_dataset,
    quadrant_report,
    sweep,
    uif_report,
    uif_witness_pairs,
)
from .modelfile import load_model_file, parse_model_file

__version__ = "0.1.0"
