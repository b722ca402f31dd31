from fractions import Fraction

import pytest

from causalpcfg import (
    CausalModel,
    Intervention,
    Mechanism,
    ModelError,
    NoiseStream,
    ScmSpec,
    SpanVar,
    counterfactual,
    counterfactual_aggregate,
    extract_spans,
    generate_unit,
    interventional_distribution,
    is_counterfactually_invariant,
    model_joint,
    parse_grammar,
    sentiment_model,
)
from causalpcfg.scm import apply_mechanisms

F = Fraction


def unit_for(model, spans_filter):
    noise = {name: F(0) for name in model.scm.label_names}
    for d, _, spans in model.outcomes:
        if all(spans[k] == v for k, v in spans_filter.items()):
            from causalpcfg.scm import Unit

            return Unit(
                derivation=d,
                mechanism_noise=noise,
                spans=spans,
                labels=apply_mechanisms(model.scm, spans, noise),
            )
    raise AssertionError(f"no derivation with spans {spans_filter}")


def test_extract_spans(confounded_model):
    d, _, spans = confounded_model.outcomes[0]
    assert extract_spans(confounded_model.grammar, d, confounded_model.scm) == {
        "x1": "the pizza",
        "x2": "was",
        "x3": "delicious",
    }


def test_extract_spans_duplicate_slot_rejected():
    g = parse_grammar("S -> A A : 1\nA -> 'x' : 1")
    spec = ScmSpec(
        span_vars=(SpanVar("v", ("A",)),),
        mechanisms=(
            Mechanism.deterministic("l", ("v",), ("one",), {("x",): "one"}),
        ),
    )
    d, _ = __import__("causalpcfg").enumerate_derivations(g)[0]
    with pytest.raises(ModelError, match="exactly one"):
        extract_spans(g, d, spec)


def test_apply_mechanism_deterministic_ignores_noise(confounded_model):
    f_y = confounded_model.scm.mechanism("y")
    for noise in (F(0), 0.999, F(1, 3)):
        assert f_y.apply(("was", "delicious"), noise) == "Pos"
        assert f_y.apply(("was not", "greasy"), noise) == "Pos"
        assert f_y.apply(("was", "greasy"), noise) == "Neg"


def test_apply_mechanism_stochastic_inverse_cdf():
    m = Mechanism(
        "l", ("p",), ("a", "b"), {("v",): (F(1, 2), F(1, 2))}
    )
    assert m.apply(("v",), 0.7) == "b"
    assert m.apply(("v",), F(1, 2)) == "b"  # half-open boundary
    assert m.apply(("v",), 0.49) == "a"


def test_apply_mechanism_missing_row():
    m = Mechanism.deterministic("l", ("p",), ("a",), {("v",): "a"})
    with pytest.raises(ModelError, match="no row"):
        m.apply(("unknown",), F(0))


def test_model_joint_cell(confounded_model):
    j = model_joint(confounded_model)
    assert j.prob(
        {"x1": "the pizza", "x2": "was", "x3": "delicious", "y": "Pos", "z": "Pizza"}
    ) == F(3, 16)
    assert sum(j.cells.values()) == 1


def test_label_marginal_constant_across_parameters():
    for params in [(0, 0, 0), ("1/2", "1/4", "3/4"), (1, 1, 1), ("-1/2", "1/3", "2/3")]:
        j = model_joint(sentiment_model(*map(F, params)))
        from causalpcfg import distribution

        assert distribution(j, "y") == {"Pos": F(1, 2), "Neg": F(1, 2)}


def test_counterfactual_target_swap(confounded_model):
    u = unit_for(confounded_model, {"x1": "the pizza", "x2": "was", "x3": "delicious"})
    out = counterfactual(confounded_model, u, Intervention("x1", "the sushi"))
    assert out.labels["y"] == "Pos"  # unchanged
    assert out.labels["z"] == "Sushi"


def test_counterfactual_negation_flip(confounded_model):
    u = unit_for(confounded_model, {"x1": "the pizza", "x2": "was", "x3": "delicious"})
    out = counterfactual(confounded_model, u, Intervention("x2", "was not"))
    assert out.labels["y"] == "Neg"


def test_counterfactual_adjective_flip(confounded_model):
    u = unit_for(confounded_model, {"x1": "the pizza", "x2": "was", "x3": "delicious"})
    out = counterfactual(confounded_model, u, Intervention("x3", "greasy"))
    assert out.labels["y"] == "Neg"


def test_counterfactual_null_intervention(confounded_model):
    for d, _, spans in confounded_model.outcomes:
        u = unit_for(confounded_model, spans)
        for var, value in spans.items():
            out = counterfactual(confounded_model, u, Intervention(var, value))
            assert out.spans == dict(u.spans)
            assert out.labels == dict(u.labels)


def test_counterfactual_out_of_domain_value(confounded_model):
    u = unit_for(confounded_model, {"x1": "the pizza"})
    with pytest.raises(ModelError, match="no row"):
        counterfactual(confounded_model, u, Intervention("x2", "might have been"))


def test_do_differs_from_condition(confounded_model):
    j = model_joint(confounded_model)
    from causalpcfg import condition

    do = interventional_distribution(
        confounded_model, "y", Intervention("x1", "the sushi")
    )
    assert do == {"Pos": F(1, 2), "Neg": F(1, 2)}
    observed = condition(j, ["y"], ["x1"]).rows[("the sushi",)]
    assert observed[("Pos",)] == F(1, 4)


def test_do_on_copula_leaves_target_label(confounded_model):
    from causalpcfg import distribution

    base = distribution(model_joint(confounded_model), "z")
    for value in ("was", "was not"):
        do = interventional_distribution(
            confounded_model, "z", Intervention("x2", value)
        )
        assert do == base


def test_do_with_post_intervention_conditioning(confounded_model):
    do = interventional_distribution(
        confounded_model, "y", Intervention("x3", "delicious"), {"x2": "was"}
    )
    assert do == {"Pos": F(1), "Neg": F(0)}


def test_zero_probability_conditioning_set_rejected():
    model = sentiment_model(F(0), F(1), F(1))  # negated copula never produced
    with pytest.raises(ModelError, match="probability zero"):
        interventional_distribution(
            model, "y", Intervention("x1", "the sushi"), {"x2": "was not"}
        )


def test_two_route_intervention_equality():
    for params in [(0, "1/2", "1/2"), ("1/2", "1/4", "3/4"), ("-1", "1/3", "1")]:
        model = sentiment_model(*map(F, params))
        for var in model.scm.span_names:
            for value in model.span_domain(var):
                for label in model.scm.label_names:
                    i = Intervention(var, value)
                    assert interventional_distribution(
                        model, label, i
                    ) == counterfactual_aggregate(model, label, i)


def test_two_route_equality_with_stochastic_mechanism():
    g = parse_grammar("S -> A B : 1\nA -> 'a1' : 1/3\nA -> 'a2' : 2/3\nB -> 'b' : 1")
    noisy = Mechanism(
        "l",
        ("u",),
        ("yes", "no"),
        {("a1",): (F(1, 4), F(3, 4)), ("a2",): (F(2, 3), F(1, 3))},
    )
    model = CausalModel(
        grammar=g,
        scm=ScmSpec(span_vars=(SpanVar("u", ("A",)), SpanVar("w", ("B",))), mechanisms=(noisy,)),
    )
    model.validate()
    for value in ("a1", "a2"):
        i = Intervention("u", value)
        assert interventional_distribution(model, "l", i) == counterfactual_aggregate(
            model, "l", i
        )


def test_ci_verdicts_sentiment(confounded_model):
    expected = {
        ("x1", "y"): True,
        ("x2", "y"): False,
        ("x3", "y"): False,
        ("x1", "z"): False,
        ("x2", "z"): True,
        ("x3", "z"): True,
    }
    for (feature, label), invariant in expected.items():
        r = is_counterfactually_invariant(confounded_model, feature, label)
        assert r.invariant == invariant, (feature, label)
        assert (r.witness is None) == invariant


def test_ci_witness_is_first_unit(confounded_model):
    r = is_counterfactually_invariant(confounded_model, "x2", "y")
    assert dict(r.witness.unit.spans) == {
        "x1": "the pizza",
        "x2": "was",
        "x3": "delicious",
    }
    assert r.witness.intervention == Intervention("x2", "was not")
    assert (r.witness.factual_label, r.witness.counterfactual_label) == ("Pos", "Neg")


def test_ci_structural_soundness():
    # A mechanism that does not read a span variable is invariant to it.
    g = parse_grammar("S -> A B : 1\nA -> 'a' : 1/2\nA -> 'aa' : 1/2\nB -> 'b' : 1")
    mech = Mechanism.deterministic(
        "l", ("w",), ("only",), {("b",): "only"}
    )
    model = CausalModel(
        grammar=g,
        scm=ScmSpec(span_vars=(SpanVar("u", ("A",)), SpanVar("w", ("B",))), mechanisms=(mech,)),
    )
    model.validate()
    assert is_counterfactually_invariant(model, "u", "l").invariant


def test_ci_constant_mechanism_invariant_to_all():
    g = parse_grammar("S -> A : 1\nA -> 'a' : 1/2\nA -> 'aa' : 1/2")
    mech = Mechanism.deterministic(
        "l", ("u",), ("same",), {("a",): "same", ("aa",): "same"}
    )
    model = CausalModel(
        grammar=g, scm=ScmSpec(span_vars=(SpanVar("u", ("A",)),), mechanisms=(mech,))
    )
    model.validate()
    assert is_counterfactually_invariant(model, "u", "l").invariant


def test_ci_invariance_implies_identical_do_distributions():
    model = sentiment_model(F(1, 2), F(1, 3), F(3, 4))
    for feature in model.scm.span_names:
        for label in model.scm.label_names:
            if is_counterfactually_invariant(model, feature, label).invariant:
                dists = [
                    interventional_distribution(model, label, Intervention(feature, v))
                    for v in model.span_domain(feature)
                ]
                assert all(d == dists[0] for d in dists)


def test_generate_unit_all_zero_noise(confounded_model):
    u = generate_unit(
        confounded_model, NoiseStream.from_values([0] * 7)
    )
    assert dict(u.spans) == {"x1": "the pizza", "x2": "was", "x3": "delicious"}
    assert dict(u.labels) == {"y": "Pos", "z": "Pizza"}


def test_generate_unit_labels_match_generating_branch(confounded_model):
    # The label-linked branch and the label agree on every sampled unit.
    noise = NoiseStream.seeded(99)
    for _ in range(500):
        u = generate_unit(confounded_model, noise)
        branch = u.derivation.choices[0].rhs
        assert (u.labels["z"] == "Pizza") == (branch[0].name == "TargetPizza")
        assert (u.labels["y"] == "Pos") == (branch[1].name == "SentPos")


def test_generate_unit_empirical_conditional(confounded_model):
    noise = NoiseStream.seeded(4242)
    pizza = pos_and_pizza = 0
    for _ in range(100_000):
        u = generate_unit(confounded_model, noise)
        if u.spans["x1"] == "the pizza":
            pizza += 1
            if u.labels["y"] == "Pos":
                pos_and_pizza += 1
    assert abs(pos_and_pizza / pizza - 0.75) < 0.01


def test_degenerate_parameters_give_single_unit():
    model = sentiment_model(F(1), F(1), F(1))
    noise = NoiseStream.seeded(1)
    units = {
        (tuple(sorted(generate_unit(model, noise).spans.items())))
        for _ in range(100)
    }
    assert len(units) == 2  # only the two coupled target/sentiment sentences
