from fractions import Fraction

import pytest
from hypothesis import strategies as st

from causalpcfg import NT, Pcfg, Production, T, JointTable, VarSchema


def normalized(weights):
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


@st.composite
def acyclic_grammars(draw, max_layers=3, max_rules=3, max_rhs=2):
    """Small layered grammars: rules only reference later layers or terminals.

    Layering guarantees acyclicity; weights are positive integers normalized
    to exact rationals, so each nonterminal's rules sum to exactly 1.
    """
    n_layers = draw(st.integers(1, max_layers))
    names = [f"N{i}" for i in range(n_layers)]
    productions = []
    for i, name in enumerate(names):
        n_rules = draw(st.integers(1, max_rules))
        weights = draw(
            st.lists(st.integers(1, 5), min_size=n_rules, max_size=n_rules)
        )
        probs = normalized(weights)
        for r, prob in enumerate(probs):
            rhs = []
            n_syms = draw(st.integers(1, max_rhs))
            for s in range(n_syms):
                later = names[i + 1 :]
                if later and draw(st.booleans()):
                    rhs.append(NT(draw(st.sampled_from(later))))
                else:
                    rhs.append(T(draw(st.sampled_from("abcd"))))
            productions.append(Production(name, tuple(rhs), prob))
    return Pcfg(start=names[0], productions=tuple(productions))


@st.composite
def joint_tables(draw, max_vars=3, max_domain=3):
    n_vars = draw(st.integers(2, max_vars))
    schema = []
    for i in range(n_vars):
        size = draw(st.integers(2, max_domain))
        schema.append(VarSchema(f"v{i}", tuple(f"a{j}" for j in range(size))))
    import itertools

    keys = list(itertools.product(*(v.domain for v in schema)))
    weights = draw(
        st.lists(st.integers(0, 5), min_size=len(keys), max_size=len(keys)).filter(
            lambda ws: sum(ws) > 0
        )
    )
    probs = normalized(weights)
    cells = {k: p for k, p in zip(keys, probs) if p > 0}
    return JointTable(schema=tuple(schema), cells=cells)


@pytest.fixture
def balanced_model():
    from causalpcfg import sentiment_model

    return sentiment_model(Fraction(0), Fraction(1, 2), Fraction(1, 2))


@pytest.fixture
def confounded_model():
    from causalpcfg import sentiment_model

    return sentiment_model(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
