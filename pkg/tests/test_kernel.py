"""Syntax-level properties: classification, substitution, alpha-equivalence."""

import pytest

from polyeff.kernel import (
    Arrow,
    CVar,
    ForallC,
    ForallV,
    Judgment,
    Kind,
    KindError,
    Lam,
    Lolli,
    Var,
    VVar,
    alpha_canonical,
    alpha_eq,
    classify_type,
    free_type_vars,
    subst_term,
    subst_type,
)
from polyeff.randterms import TermGenerator
from polyeff.surface import parse_term, parse_type


def test_lolli_is_a_value_type():
    assert classify_type(parse_type("^X -o ^Y")) is Kind.VALUE


def test_arrow_into_computation_is_a_computation_type():
    assert classify_type(parse_type("B -> ^X")) is Kind.COMPUTATION


def test_plain_forall_is_a_value_type():
    assert classify_type(parse_type("forall X. X -> X")) is Kind.VALUE


def test_quantifiers_preserve_computation_status():
    assert classify_type(parse_type("forall X. ^P")) is Kind.COMPUTATION
    assert classify_type(parse_type("forall ^X. ^X")) is Kind.COMPUTATION
    assert classify_type(parse_type("forall ^X. X")) is Kind.VALUE


def test_classification_is_deterministic():
    ty = parse_type("(^A -o ^B) -> forall X. X -> ^C")
    assert classify_type(ty) is classify_type(ty) is Kind.COMPUTATION


def test_lolli_rejects_value_operands():
    with pytest.raises(KindError):
        classify_type(Lolli(VVar("B"), CVar("C")))
    with pytest.raises(KindError):
        classify_type(Lolli(CVar("C"), VVar("B")))


def test_subst_type_variable_case():
    replacement = parse_type("B -> ^Y")
    assert subst_type(CVar("X"), CVar("X"), replacement) == replacement


def test_subst_type_bound_variable_shadows():
    ty = ForallV("X", VVar("X"))
    assert subst_type(ty, VVar("X"), VVar("Z")) == ty


def test_subst_type_sort_mismatch_rejected():
    with pytest.raises(KindError):
        subst_type(CVar("X"), CVar("X"), VVar("B"))


def test_subst_type_avoids_capture():
    # (forall Y. X -> Y)[X := Y] must rename the binder
    ty = ForallV("Y", Arrow(VVar("X"), VVar("Y")))
    out = subst_type(ty, VVar("X"), VVar("Y"))
    assert alpha_eq(out, ForallV("Z", Arrow(VVar("Y"), VVar("Z"))))
    assert not alpha_eq(out, ForallV("Z", Arrow(VVar("Z"), VVar("Z"))))


def _contains_lolli(ty):
    if isinstance(ty, Lolli):
        return True
    if isinstance(ty, Arrow):
        return _contains_lolli(ty.dom) or _contains_lolli(ty.cod)
    if isinstance(ty, (ForallV, ForallC)):
        return _contains_lolli(ty.body)
    return False


def test_substituting_into_monadic_body_keeps_value_class():
    # the body (B -> ^X) -> ^X stays a value type and lolli-free for any
    # computation type put at ^X; the classifier is the oracle
    body = parse_type("(B -> ^X) -> ^X")
    gen = TermGenerator(5)
    for _ in range(20):
        replacement = gen.random_type(2, Kind.COMPUTATION)
        out = subst_type(body, CVar("X"), replacement)
        assert classify_type(out) is Kind.COMPUTATION
        assert classify_type(Arrow(out, VVar("Z"))) is Kind.VALUE
        if not _contains_lolli(replacement):
            assert not _contains_lolli(out)


def test_subst_term_variable():
    t = parse_term("fun y:B => y")
    assert subst_term(Var("x"), "x", t) == t


def test_subst_term_capture_avoidance():
    # (fun y:B => x)[x := y] renames the binder
    body = Lam("y", VVar("B"), Var("x"))
    out = subst_term(body, "x", Var("y"))
    assert isinstance(out, Lam)
    assert out.var != "y"
    assert out.body == Var("y")


def test_subst_term_congruence():
    t = parse_term("u v")
    out = subst_term(t, "u", Var("w"))
    assert out == parse_term("w v")


def test_subst_term_protects_type_binders():
    # (Fun X => fun y:X => x)[x := fun z:X => z] must not capture the X
    # free in the replacement's annotation
    body = parse_term("Fun X => fun y:X => x")
    repl = parse_term("fun z:X => z")
    out = subst_term(body, "x", repl)
    assert out.binder != "X"


def test_alpha_eq_binders():
    assert alpha_eq(parse_type("forall X. X -> X"), parse_type("forall Y. Y -> Y"))


def test_alpha_eq_distinct_sorts():
    assert not alpha_eq(ForallV("X", VVar("X")), ForallC("X", CVar("X")))


def test_alpha_eq_monadic_elaborations():
    from polyeff.encodings import encode_bang

    one = encode_bang(VVar("B"))
    other = ForallC("Q", Arrow(Arrow(VVar("B"), CVar("Q")), CVar("Q")))
    assert alpha_eq(one, other)


def test_alpha_eq_distinguishes_free_variables():
    assert not alpha_eq(VVar("X"), VVar("Y"))
    assert alpha_eq(VVar("X"), VVar("X"))


def test_subst_commutes_with_alpha():
    gen = TermGenerator(9)
    for _ in range(25):
        body = gen.random_type(2)
        renamed = alpha_canonical(body)
        replacement = gen.random_type(1)
        for var in sorted(free_type_vars(body), key=str):
            if isinstance(var, CVar) and classify_type(replacement) is not Kind.COMPUTATION:
                continue
            assert alpha_eq(
                subst_type(body, var, replacement), subst_type(renamed, var, replacement)
            )


def test_alpha_canonical_is_alpha_invariant():
    a = parse_type("forall X. forall Y. X -> Y")
    b = parse_type("forall U. forall V. U -> V")
    assert alpha_canonical(a) == alpha_canonical(b)


def test_judgment_validation():
    Judgment((("x", VVar("B")),), None, Var("x")).validate()
    with pytest.raises(ValueError):
        Judgment((("x", VVar("B")),), ("x", CVar("A")), Var("x")).validate()
    with pytest.raises(KindError):
        Judgment((), ("x", VVar("B")), Var("x")).validate()
