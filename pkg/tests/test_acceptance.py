"""Acceptance criteria, one check per criterion.

Every criterion is exact (finite discrete structures, no tolerances) and
runs standalone against a freshly built model; each prints a single
PASS/FAIL line with its runtime.  Budgets are the stated wall-clock
limits per criterion.
"""

import time

from polyeff import finmodel as fm
from polyeff import paramlab as pl

EXC1 = fm.ModelConfig("exception", ("e",), 2, False)
EXC1_FREE = fm.ModelConfig("exception", ("e",), 2, True)


def report(n, name, ok, elapsed, budget, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"{status} criterion {n:2d} ({name}): {elapsed:.2f}s / {budget:.0f}s {detail}")
    assert ok, f"criterion {n} ({name}) failed: {detail}"
    assert elapsed < budget, f"criterion {n} exceeded its {budget}s budget: {elapsed:.2f}s"


def test_criterion_01_typing_conformance():
    t0 = time.perf_counter()
    rep = pl.verify_typing_corpus()
    ok = (
        rep.status == "verified"
        and rep.counts["positives"] >= 30
        and rep.counts["negatives"] >= 15
    )
    report(1, "typing conformance", ok, time.perf_counter() - t0, 1.0, str(rep.witness or ""))


def test_criterion_02_metatheory():
    t0 = time.perf_counter()
    rep = pl.verify_metatheory(seed=2024, n_unicity=200, n_subst=100)
    ok = rep.status == "verified" and rep.counts["unicity-terms"] == 200
    report(2, "unicity + substitution", ok, time.perf_counter() - t0, 10.0, str(rep.witness or ""))


def test_criterion_03_monad_laws():
    t0 = time.perf_counter()
    rep = pl.verify_monad_laws(4)
    report(3, "monad laws to size 4", rep.status == "verified", time.perf_counter() - t0, 5.0,
           str(rep.witness or ""))


def test_criterion_04_relation_axioms():
    t0 = time.perf_counter()
    ok = True
    detail = ""
    for monad, excs in (("exception", ("e",)), ("powerset", ())):
        rep = pl.verify_rel_axioms(pl.build_model(fm.ModelConfig(monad, excs, 2, False)))
        if rep.status != "verified":
            ok, detail = False, f"{monad}: {rep.witness}"
    report(4, "relation axioms R1-R3", ok, time.perf_counter() - t0, 30.0, detail)


def test_criterion_05_identity_extension():
    t0 = time.perf_counter()
    model = pl.build_model(EXC1)
    rep = pl.verify_identity_extension(model)
    ok = rep.status == "verified" and rep.counts["types"] >= 20
    report(5, "identity extension", ok, time.perf_counter() - t0, 60.0, str(rep.witness or ""))


def test_criterion_06_abstraction_theorem():
    t0 = time.perf_counter()
    model = pl.build_model(EXC1)
    rep = pl.verify_abstraction(model, seed=17, n_terms=100)
    ok = rep.status == "verified" and rep.counts["hom-instances"] > 0
    report(6, "relational invariance", ok, time.perf_counter() - t0, 120.0, str(rep.witness or ""))


def test_criterion_07_bang_laws():
    t0 = time.perf_counter()
    rep = pl.verify_bang_laws(pl.build_model(EXC1_FREE))
    report(7, "monadic let laws", rep.status == "verified", time.perf_counter() - t0, 60.0,
           str(rep.witness or ""))


def test_criterion_08_free_algebra():
    t0 = time.perf_counter()
    model = pl.build_model(EXC1_FREE)
    rep = pl.verify_free_algebra(model, max_a=2, max_carrier=3)
    neg = pl.free_algebra_negative_control(model)
    ok = (
        rep.status == "verified"
        and neg.status == "counterexample"
        and pl.replay_negative_control(model, neg)
    )
    report(8, "free-algebra property", ok, time.perf_counter() - t0, 60.0, str(rep.witness or ""))


def test_criterion_09_bang_cardinality():
    t0 = time.perf_counter()
    rep = pl.verify_bang_cardinality(pl.build_model(EXC1_FREE), sizes=(0, 1, 2))
    ok = rep.status == "verified" and rep.counts == {"|A|=0": 1, "|A|=1": 2, "|A|=2": 3}
    id_rep = pl.verify_bang_cardinality(
        pl.build_model(fm.ModelConfig("identity", (), 2, True)), sizes=(1, 2)
    )
    ok = ok and id_rep.status == "verified" and id_rep.counts == {"|A|=1": 1, "|A|=2": 2}
    report(9, "monadic-type cardinality", ok, time.perf_counter() - t0, 120.0,
           f"{rep.counts} {id_rep.counts}")


def test_criterion_10_relational_lifting():
    t0 = time.perf_counter()
    rep = pl.verify_rel_lifting(pl.build_model(EXC1_FREE), max_size=2)
    report(10, "lifting characterisations", rep.status == "verified",
           time.perf_counter() - t0, 120.0, str(rep.witness or ""))


def test_criterion_11_algebraic_operations():
    t0 = time.perf_counter()
    ok = True
    detail = ""
    for n, count in ((0, 1), (1, 2), (2, 3)):
        model = pl.build_model(EXC1, force_free=False)
        model.register_free_algebra(fm.FinSet(n))
        rep = pl.verify_algop_correspondence(model, n)
        if rep.status != "verified" or rep.counts["parametric-elements"] != count:
            ok, detail = False, f"exception n={n}: {rep.counts} {rep.witness}"
    pmodel = pl.build_model(fm.ModelConfig("powerset", (), 3, False))
    pmodel.register_free_algebra(fm.FinSet(2))
    prep = pl.verify_algop_correspondence(pmodel, 2)
    if prep.status != "verified" or prep.counts["parametric-elements"] != 3:
        ok, detail = False, f"powerset: {prep.counts} {prep.witness}"
    report(11, "operation correspondences", ok, time.perf_counter() - t0, 300.0, detail)


def test_criterion_12_handler():
    t0 = time.perf_counter()
    ok = True
    detail = ""
    for excs in (("e",), ("e1", "e2")):
        model = pl.build_model(fm.ModelConfig("exception", excs, 2, True))
        rep = pl.verify_handler(model, max_size=2)
        if rep.status != "verified":
            ok, detail = False, f"E={excs}: {rep.witness}"
    report(12, "exception handler", ok, time.perf_counter() - t0, 120.0, detail)


def test_criterion_13_encoding_properties():
    t0 = time.perf_counter()
    rep = pl.verify_encoding_props(pl.build_model(EXC1_FREE))
    report(13, "encoding universal properties", rep.status == "verified",
           time.perf_counter() - t0, 300.0, str(rep.witness or ""))


def test_criterion_14_cbpv_translation():
    t0 = time.perf_counter()
    rep = pl.verify_cbpv()
    ok = rep.status == "verified" and rep.counts["types"] == 10
    report(14, "call-by-push-value translation", ok, time.perf_counter() - t0, 1.0,
           str(rep.witness or ""))
