"""Theorem verifiers: statuses, counts, witnesses, oracle agreement."""

import json

import pytest

from polyeff import finmodel as fm
from polyeff import interp as ip
from polyeff import paramlab as pl


@pytest.fixture(scope="module")
def exc_free():
    return pl.build_model(fm.ModelConfig("exception", ("e",), 2, True))


@pytest.fixture(scope="module")
def exc_plain():
    return pl.build_model(fm.ModelConfig("exception", ("e",), 2, False))


def test_bang_laws(exc_free):
    rep = pl.verify_bang_laws(exc_free)
    assert rep.status == "verified", rep.witness


def test_bang_laws_require_free_algebras(exc_plain):
    assert pl.verify_bang_laws(exc_plain).status == "out-of-bound"


def test_free_algebra_universal_property(exc_free):
    rep = pl.verify_free_algebra(exc_free)
    assert rep.status == "verified", rep.witness
    assert rep.counts["instances"] > 0


def test_negative_control_produces_replayable_witness(exc_free):
    rep = pl.free_algebra_negative_control(exc_free)
    assert rep.status == "counterexample"
    assert pl.replay_negative_control(exc_free, rep)


def test_bang_cardinality_counts(exc_free):
    rep = pl.verify_bang_cardinality(exc_free)
    assert rep.status == "verified", rep.witness
    assert rep.counts == {"|A|=0": 1, "|A|=1": 2, "|A|=2": 3}


def test_bang_cardinality_identity_monad():
    model = pl.build_model(fm.ModelConfig("identity", (), 2, True))
    rep = pl.verify_bang_cardinality(model, sizes=(1, 2))
    assert rep.status == "verified", rep.witness
    assert rep.counts == {"|A|=1": 1, "|A|=2": 2}


def test_rel_lifting_characterisations(exc_free):
    rep = pl.verify_rel_lifting(exc_free)
    assert rep.status == "verified", rep.witness


def test_lifting_of_empty_relation_is_the_raise_pair(exc_free):
    lifted = pl.lifted_rel(exc_free, frozenset(), 1, 1)
    assert lifted == frozenset({(1, 1)})


def test_lifting_of_diagonal_is_diagonal(exc_free):
    diag = frozenset((i, i) for i in range(2))
    assert pl.lifted_rel(exc_free, diag, 2, 2) == frozenset((i, i) for i in range(3))


def test_lifting_of_graph_is_graph_of_tmap(exc_free):
    f = (1, 0)
    graph = frozenset((x, f[x]) for x in range(2))
    tf = exc_free.monad.tmap(f, fm.FinSet(2), fm.FinSet(2))
    want = frozenset((z, tf[z]) for z in range(3))
    assert pl.lifted_rel(exc_free, graph, 2, 2) == want


def test_algop_correspondence_counts(exc_free):
    for n, count in [(0, 1), (1, 2), (2, 3)]:
        rep = pl.verify_algop_correspondence(exc_free, n)
        assert rep.status == "verified", rep.witness
        assert rep.counts["natural-transformations"] == count
        assert rep.counts["generic-effects"] == count
        assert rep.counts["parametric-elements"] == count


def test_algop_powerset_bound_three():
    model = pl.build_model(fm.ModelConfig("powerset", (), 3, False))
    model.register_free_algebra(fm.FinSet(2))
    rep = pl.verify_algop_correspondence(model, 2)
    assert rep.status == "verified", rep.witness
    assert rep.counts["parametric-elements"] == 3


def test_handler(exc_free):
    rep = pl.verify_handler(exc_free)
    assert rep.status == "verified", rep.witness


def test_handler_two_exceptions():
    model = pl.build_model(fm.ModelConfig("exception", ("e1", "e2"), 2, True))
    rep = pl.verify_handler(model)
    assert rep.status == "verified", rep.witness


def test_handler_needs_exception_monad():
    model = pl.build_model(fm.ModelConfig("powerset", (), 2, True))
    assert pl.verify_handler(model).status == "out-of-bound"


def test_encoding_props(exc_free):
    rep = pl.verify_encoding_props(exc_free)
    assert rep.status == "verified", rep.witness


def test_identity_extension(exc_plain):
    rep = pl.verify_identity_extension(exc_plain)
    assert rep.status == "verified", rep.witness
    assert rep.counts["types"] >= 20


def test_abstraction_theorem(exc_plain):
    rep = pl.verify_abstraction(exc_plain, seed=17, n_terms=25)
    assert rep.status == "verified", rep.witness
    assert rep.counts["hom-instances"] > 0


def test_relation_axioms_powerset():
    model = pl.build_model(fm.ModelConfig("powerset", (), 2, False))
    rep = pl.verify_rel_axioms(model)
    assert rep.status == "verified", rep.witness


def test_monad_laws_report():
    rep = pl.verify_monad_laws(3)
    assert rep.status == "verified", rep.witness


def test_parametric_counts_and_oracle_agreement(exc_free, exc_plain):
    rep = pl.verify_parametric_counts(exc_free, exc_plain)
    assert rep.status == "verified", rep.witness
    assert rep.counts == {"n=0": 1, "n=1": 2, "n=2": 3}


def test_naive_oracle_matches_propagation(exc_plain):
    # at the plain bound, both tiers must produce identical element sets
    for n in (1, 2):
        ty = pl.nary_op_type(n)
        naive = exc_plain.enumerate_families_naive(ip.TypeEnv(), ty)
        poly = exc_plain.interp_vtype(ip.TypeEnv(), ty)
        assert naive == poly.fams


def test_typing_corpus_sizes():
    positives, negatives, _ = pl.typing_corpus()
    assert len(positives) >= 30
    assert len(negatives) >= 15
    rep = pl.verify_typing_corpus()
    assert rep.status == "verified", rep.witness


def test_cbpv_report():
    rep = pl.verify_cbpv()
    assert rep.status == "verified", rep.witness
    assert rep.counts["types"] == 10


def test_report_json_shape(exc_free):
    rep = pl.verify_bang_cardinality(exc_free)
    data = json.loads(rep.to_json())
    assert data["theorem-id"] == "bang-cardinality"
    assert data["status"] == "verified"
    assert "runtime-ms" in data
    stable = json.loads(rep.to_json(include_runtime=False))
    assert "runtime-ms" not in stable


def test_verified_reports_are_reproducible(exc_free):
    a = pl.verify_bang_cardinality(exc_free).to_json(include_runtime=False)
    b = pl.verify_bang_cardinality(exc_free).to_json(include_runtime=False)
    assert a == b


def test_enumerate_parametric_elements_decodes(exc_free):
    vals = pl.enumerate_parametric_elements(exc_free, pl.nary_op_type(0))
    assert len(vals) == 1
    assert vals[0].kind == "poly"


@pytest.fixture(scope="module")
def pow_free():
    return pl.build_model(fm.ModelConfig("powerset", (), 2, True))


def test_bang_laws_hold_for_nondeterminism(pow_free):
    rep = pl.verify_bang_laws(pow_free)
    assert rep.status == "verified", rep.witness


def test_bang_cardinality_nondeterminism(pow_free):
    # |T A| counts the nonempty subsets: 0, 1, 3
    rep = pl.verify_bang_cardinality(pow_free, sizes=(0, 1, 2))
    assert rep.status == "verified", rep.witness
    assert rep.counts == {"|A|=0": 0, "|A|=1": 1, "|A|=2": 3}


def test_free_algebra_nondeterminism(pow_free):
    rep = pl.verify_free_algebra(pow_free, max_a=2, max_carrier=3)
    assert rep.status == "verified", rep.witness


def test_free_algebra_identity_monad():
    model = pl.build_model(fm.ModelConfig("identity", (), 2, True))
    rep = pl.verify_free_algebra(model, max_a=2, max_carrier=2)
    assert rep.status == "verified", rep.witness


def test_powerset_monadic_count_at_bound_three():
    from polyeff import encodings as enc
    from polyeff import interp as ip
    from polyeff.kernel import VVar

    model = pl.build_model(fm.ModelConfig("powerset", (), 3, False))
    model.register_free_algebra(fm.FinSet(2))
    env = ip.TypeEnv().set(ip.VSORT, "A", fm.FinSet(2))
    poly = model.interp_vtype(env, enc.encode_bang(VVar("A")))
    assert poly.size == 3


def test_parametric_counts_nondeterminism(pow_free):
    # |T(n)| for the nonempty-powerset monad: 0, 1, 3
    plain = pl.build_model(fm.ModelConfig("powerset", (), 2, False))
    rep = pl.verify_parametric_counts(pow_free, plain)
    assert rep.status == "verified", rep.witness
    assert rep.counts == {"n=0": 0, "n=1": 1, "n=2": 3}


def test_algop_nondeterminism_all_arities():
    for n, count in ((0, 0), (1, 1), (2, 3)):
        model = pl.build_model(fm.ModelConfig("powerset", (), 2, False))
        model.register_free_algebra(fm.FinSet(n))
        rep = pl.verify_algop_correspondence(model, n)
        assert rep.status == "verified", rep.witness
        assert rep.counts["parametric-elements"] == count
