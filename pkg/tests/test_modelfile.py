from fractions import Fraction

import pytest

from causalpcfg import model_joint, parse_model_file
from causalpcfg.modelfile import ModelFileError, load_model_file

F = Fraction

SMALL = """
# two-word sentences with one stochastic label
[grammar]
S -> A B : 1
A -> 'left' : 1/2
A -> 'middle' : 1/2
B -> 'right' : 1

[spans]
u = A
w = B

[mechanism l]
parents = u
outputs = Yes No
'left' -> Yes
'middle' -> Yes No : 1/4 3/4
"""


def test_parse_small_model():
    model = parse_model_file(SMALL)
    assert model.scm.span_names == ("u", "w")
    j = model_joint(model)
    assert j.prob({"u": "left", "w": "right", "l": "Yes"}) == F(1, 2)
    assert j.prob({"u": "middle", "w": "right", "l": "No"}) == F(3, 8)


def test_interventions_section_extends_domain():
    extended = SMALL + (
        "'far' -> No\n"  # extra mechanism row for the unproducible value
        "\n[interventions]\nu = 'left' 'middle' 'far'\n"
    )
    model = parse_model_file(extended)
    assert model.span_domain("u") == ("left", "middle", "far")


def test_extended_domain_without_row_rejected():
    from causalpcfg import ModelError

    text = SMALL + "\n[interventions]\nu = 'left' 'middle' 'far'\n"
    with pytest.raises(ModelError, match="no row"):
        parse_model_file(text)


def test_grammar_from_file(tmp_path):
    (tmp_path / "g.txt").write_text("S -> 'x' : 1\n", encoding="utf-8")
    (tmp_path / "m.cfg").write_text(
        "[grammar]\nfile = g.txt\n[spans]\nu = S\n"
        "[mechanism l]\nparents = u\noutputs = A\n'x' -> A\n",
        encoding="utf-8",
    )
    model = load_model_file(tmp_path / "m.cfg")
    assert model.grammar.terminals == ("x",)


def test_missing_sections_rejected():
    with pytest.raises(ModelFileError, match="grammar"):
        parse_model_file("[spans]\nu = A\n")


def test_unknown_section_rejected():
    with pytest.raises(ModelFileError, match="unknown section"):
        parse_model_file(SMALL + "\n[mystery]\nkey = value\n")


def test_mechanism_row_must_sum_to_one():
    bad = SMALL.replace("1/4 3/4", "1/4 1/4")
    with pytest.raises(ModelFileError, match="sum to 1"):
        parse_model_file(bad)


def test_deterministic_row_output_must_exist():
    bad = SMALL.replace("'left' -> Yes", "'left' -> Maybe")
    with pytest.raises(ModelFileError, match="Maybe"):
        parse_model_file(bad)
