import pytest
from hypothesis import given, strategies as st

from lintab.terms import (
    Const,
    CyclicTermError,
    FreshVars,
    Struct,
    Var,
    apply,
    apply_tuple,
    canonicalize,
    compose,
    format_term,
    format_tuple,
    is_variant,
    max_var_id,
    rename_apart,
    unify,
    vars_of,
)

X, Y, Z = Var(0, "X"), Var(1, "Y"), Var(2, "Z")
a, b = Const("a"), Const("b")


def p(*args):
    return Struct("p", args)


# -- identity and formatting ------------------------------------------


def test_var_identity_is_id_only():
    assert Var(3, "X") == Var(3, "Y")
    assert hash(Var(3, "X")) == hash(Var(3, "Y"))
    assert Var(3, "X") != Var(4, "X")


def test_format_term():
    assert format_term(p(a, X)) == "p(a,X)"
    assert format_term(Struct("f", (Struct("g", (X,)), b))) == "f(g(X),b)"
    assert format_term(Struct("q", ())) == "q"


def test_format_tuple():
    assert format_tuple((a, b)) == "(a,b)"
    assert format_tuple((b,)) == "(b)"
    assert format_tuple(()) == "()"


def test_vars_of_first_occurrence():
    assert vars_of(p(Y, X, Y)) == [Y, X]
    assert vars_of((p(X), [p(Z), p(X, Y)])) == [X, Z, Y]
    assert vars_of(a) == []


def test_max_var_id():
    assert max_var_id(p(X, Z)) == 2
    assert max_var_id((a, b)) == -1


# -- substitution ------------------------------------------------------


def test_apply_follows_chains():
    s = {X: Y, Y: a}
    assert apply(X, s) == a
    assert apply(p(X, Z), s) == p(a, Z)
    assert apply_tuple((X, b), s) == (a, b)


def test_apply_cyclic_chain_raises():
    with pytest.raises(CyclicTermError):
        apply(X, {X: Y, Y: X})
    with pytest.raises(CyclicTermError):
        apply(X, {X: Struct("f", (X,))})


def test_unify_mgu():
    s = unify(p(X, b), p(a, Y))
    assert s == {X: a, Y: b}
    assert unify(p(a), p(b)) is None
    assert unify(p(X), Struct("q", (X,))) is None


def test_unify_binds_younger_to_older():
    assert unify(Var(5, "V"), X) == {Var(5, "V"): X}
    assert unify(X, Var(5, "V")) == {Var(5, "V"): X}


def test_unify_occurs_check():
    assert unify(X, Struct("f", (X,)), occurs_check=True) is None
    s = unify(X, Struct("f", (X,)))
    assert s is not None
    with pytest.raises(CyclicTermError):
        apply(X, s)


def test_compose_drops_identities():
    s = compose({X: Y}, {Y: X})
    assert X not in s
    assert s[Y] == X


# -- canonical form and renaming ---------------------------------------


def test_canonicalize_shapes():
    t = canonicalize(p(Var(7, "A"), a, Var(7, "A")))
    assert format_term(t) == "p(_0,a,_0)"
    tup = canonicalize((X, p(Y, X)))
    assert format_tuple(tup) == "(_0,p(_1,_0))"


def test_canonical_vars_cannot_collide():
    t = canonicalize(p(X))
    assert all(v.id < 0 for v in vars_of(t))


def test_is_variant():
    assert is_variant(p(X, Y), p(Z, X))
    assert not is_variant(p(X, X), p(X, Y))
    assert not is_variant(p(X), p(a))


def test_rename_apart_is_structural():
    fresh = FreshVars(1)
    t = rename_apart(p(Var(1, "A"), Var(2, "B")), fresh)
    assert is_variant(t, p(X, Y))
    assert len(set(vars_of(t))) == 2
    assert all(v.id >= 1 for v in vars_of(t))


def test_rename_apart_shared_mapping():
    fresh = FreshVars(10)
    mapping = {}
    h = rename_apart(p(X, Y), fresh, mapping)
    body = rename_apart((p(Y, Z),), fresh, mapping)
    assert h.args[1] == body[0].args[0]


def test_fresh_vars_monotone():
    fresh = FreshVars(5)
    u, v = fresh.new(), fresh.new()
    assert u.id == 5 and v.id == 6


# -- properties ---------------------------------------------------------

consts = st.sampled_from([a, b])
variables = st.builds(Var, st.integers(min_value=0, max_value=3), st.just("V"))
terms = st.recursive(
    consts | variables,
    lambda children: st.builds(
        Struct,
        st.sampled_from(["f", "g"]),
        st.tuples(children) | st.tuples(children, children),
    ),
    max_leaves=6,
)
bindings = st.dictionaries(
    st.builds(Var, st.integers(min_value=0, max_value=3), st.just("V")),
    consts,
    max_size=3,
)


@given(terms)
def test_canonicalize_idempotent(t):
    c = canonicalize(t)
    assert canonicalize(c) == c


@given(terms)
def test_renaming_preserves_variant_class(t):
    assert is_variant(t, rename_apart(t, FreshVars(100)))


@given(terms, terms)
def test_unify_produces_a_unifier(t1, t2):
    # occurs check keeps the result acyclic so apply cannot raise
    s = unify(t1, t2, occurs_check=True)
    if s is not None:
        assert apply(t1, s) == apply(t2, s)


@given(terms, bindings, bindings)
def test_compose_law(t, s1, s2):
    assert apply(t, compose(s1, s2)) == apply(apply(t, s1), s2)
