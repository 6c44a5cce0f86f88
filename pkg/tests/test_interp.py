"""Finite denotational and relational semantics."""

from itertools import product

import pytest

from polyeff import encodings as enc
from polyeff import finmodel as fm
from polyeff import interp as ip
from polyeff import typecheck as tc
from polyeff.kernel import (
    CVar,
    Judgment,
    Var,
    VVar,
)
from polyeff.surface import parse_term, parse_type


EXC = fm.MonadSpec("exception", ("e",))
POW = fm.MonadSpec("powerset")


@pytest.fixture(scope="module")
def model():
    return ip.Model(EXC, 2)


@pytest.fixture(scope="module")
def free_model():
    consts = enc.register_effect_constants("exception", ("e",))
    return ip.Model(EXC, 2, include_free_algebras=True, constants=consts)


def test_variable_lookup(model):
    env = ip.type_env({"X": fm.FinSet(2)})
    assert model.interp_vtype(env, VVar("X")).size == 2


def test_function_space_cardinality(model):
    env = ip.type_env({"B": fm.FinSet(2), "C": fm.FinSet(3)})
    assert model.interp_vtype(env, parse_type("B -> C")).size == 9


def test_polymorphic_endomap_cardinality(model):
    # exhaustive family enumeration filtered by all admissible relations
    ty = parse_type("forall ^X. ^X -> ^X")
    poly = model.interp_vtype(ip.TypeEnv(), ty)
    assert poly.size == 2
    assert model.enumerate_families_naive(ip.TypeEnv(), ty) == poly.fams


def test_hom_space_matches_enumeration(model):
    alg_a = model.algebras[1]
    alg_b = model.algebras[2]
    env = ip.type_env({}, {"A": alg_a, "B": alg_b})
    sem = model.interp_vtype(env, parse_type("^A -o ^B"))
    assert sem.tables == tuple(fm.enumerate_homs(alg_a, alg_b))


def test_carrier_agrees_with_set_interpretation(model):
    env = ip.type_env({"B": fm.FinSet(2)}, {"P": model.algebras[1], "Q": model.algebras[2]})
    battery = [
        parse_type("^P"),
        parse_type("B -> ^P"),
        parse_type("B -> B -> ^Q"),
        parse_type("forall X. ^P"),
        parse_type("forall ^X. ^X -> ^X"),
        enc.encode_bang(VVar("B")),
        enc.encode_comp_type("Oplus", (CVar("P"), CVar("Q"))),
    ]
    for ty in battery:
        alg = model.interp_ctype(env, ty)
        sem = model.interp_vtype(env, ty)
        assert alg.carrier.size == sem.size


def test_pointwise_exception_structure(model):
    env = ip.type_env({"B": fm.FinSet(2)}, {"P": model.algebras[2]})
    ty = parse_type("B -> ^P")
    alg = model.interp_ctype(env, ty)
    sem = model.interp_vtype(env, ty)
    raise_table = sem.table(alg.raise_points[0])
    assert raise_table == (1, 1)  # constantly the codomain's distinguished point


def test_pointwise_powerset_structure():
    pmodel = ip.Model(POW, 2)
    lattice = [a for a in pmodel.algebras if a.carrier.size == 2][0]
    env = ip.type_env({"B": fm.FinSet(2)}, {"P": lattice})
    alg = pmodel.interp_ctype(env, parse_type("B -> ^P"))
    sem = pmodel.interp_vtype(env, parse_type("B -> ^P"))
    for f in range(sem.size):
        for g in range(sem.size):
            joined = sem.table(alg.op_or(f, g))
            assert joined == tuple(
                lattice.op_or(sem.apply(f, x), sem.apply(g, x)) for x in range(2)
            )


def test_relation_clause_for_variables(model):
    r = frozenset({(0, 1)})
    rho = ip.RelEnv(ip.TypeEnv(), ip.TypeEnv()).set(
        ip.VSORT, "X", fm.FinSet(2), fm.FinSet(2), r
    )
    assert model.interp_rel(rho, VVar("X")).pairs() == r


def test_identity_extension_on_sample_types(model):
    env = ip.type_env({"B": fm.FinSet(2)}, {"P": model.algebras[1]})
    for src in ["B -> B", "B -> ^P", "^P -o ^P", "forall X. X -> X", "forall ^X. ^X -> ^X"]:
        ty = parse_type(src)
        view = model.interp_rel(ip.diag_relenv(env), ty)
        n = model.interp_vtype(env, ty).size
        assert view.pairs() == frozenset((i, i) for i in range(n))


def test_graph_relation_on_endomaps(model):
    # (g1, g2) related in [[X -> X]] at Graph(f) iff g2 . f = f . g1,
    # checked against the direct unfolding
    a = fm.FinSet(2)
    for f in product(range(2), repeat=2):
        graph = frozenset((x, f[x]) for x in range(2))
        rho = ip.RelEnv(ip.TypeEnv(), ip.TypeEnv()).set(ip.VSORT, "X", a, a, graph)
        view = model.interp_rel(rho, parse_type("X -> X"))
        sem = model.interp_vtype(ip.type_env({"X": a}), parse_type("X -> X"))
        for g1 in range(sem.size):
            for g2 in range(sem.size):
                want = all(
                    sem.apply(g2, f[x]) == f[sem.apply(g1, x)] for x in range(2)
                )
                assert view.contains(g1, g2) == want


def test_materialized_relation_matches_view(model):
    env = ip.type_env({"B": fm.FinSet(2)})
    rel = model.interp_rel_pairs(ip.diag_relenv(env), parse_type("B -> B"))
    assert rel.pairs == frozenset((i, i) for i in range(4))


def test_identity_function_denotation(model):
    j = Judgment((), None, parse_term("fun x:B => x"))
    val = model.interp_term(j, ip.Env(vvars={"B": fm.FinSet(3)}))
    sem = model.interp_vtype(ip.type_env({"B": fm.FinSet(3)}), parse_type("B -> B"))
    assert sem.table(val) == (0, 1, 2)


def test_thunk_applies_the_continuation(free_model):
    # [[bang t]](B)(f) = f([[t]])
    model = free_model
    gamma = (("t", VVar("A")),)
    bang = enc.elaborate_term(parse_term("bang t"), gamma=gamma)
    env = ip.type_env({"A": fm.FinSet(2)})
    poly = model.interp_vtype(env, enc.encode_bang(VVar("A")))
    for tval in range(2):
        fam = model._eval(bang, gamma, None, env, {"t": tval})
        for k, alg in enumerate(model.algebras):
            comp = poly.comps[k]
            for f in range(comp.dom.size):
                assert comp.apply(poly.fams[fam][k], f) == comp.dom.apply(f, tval)


def test_handler_case_split(free_model):
    model = free_model
    val = model.constant_value("handle^e")
    scheme = model.constants["handle^e"][0]
    poly = model.interp_vtype(ip.TypeEnv(), scheme)
    i0, i1 = model.two_values()
    for a in (0, 1, 2):
        comp = poly.comps[a]
        to_t, from_t = model.bang_bridge(a)
        ta = a + 1
        for p in range(ta):
            for q in range(ta):
                table = [0, 0]
                table[i0], table[i1] = from_t[p], from_t[q]
                u = comp.dom.encode(table)
                got = to_t[comp.apply(poly.fams[val][a], u)]
                assert got == (q if p == a else p)  # index a is the raised exception


def test_raise_constant_is_the_raise_family(free_model):
    model = free_model
    val = model.constant_value("raise^e")
    scheme = model.constants["raise^e"][0]
    poly = model.interp_vtype(ip.TypeEnv(), scheme)
    assert poly.fams[val] == tuple(alg.raise_points[0] for alg in model.algebras)


def test_or_constant_is_the_join_family():
    consts = enc.register_effect_constants("powerset")
    pmodel = ip.Model(POW, 2, include_free_algebras=True, constants=consts)
    val = pmodel.constant_value("or")
    scheme = pmodel.constants["or"][0]
    poly = pmodel.interp_vtype(ip.TypeEnv(), scheme)
    for k, alg in enumerate(pmodel.algebras):
        comp = poly.comps[k]
        for x in range(alg.carrier.size):
            inner = comp.apply(poly.fams[val][k], x)
            for y in range(alg.carrier.size):
                assert comp.cod.apply(inner, y) == alg.op_or(x, y)


# -- transport and projection ------------------------------------------------


def test_transport_identity_is_identity(model):
    env = ip.type_env({"X": fm.FinSet(2)})
    mover = model.transport(parse_type("X -> X"), env, env, {(ip.VSORT, "X"): (0, 1)})
    for v in range(4):
        assert mover(v) == v


def test_transport_composes(model):
    a = fm.FinSet(2)
    env = ip.type_env({"X": a})
    i = (1, 0)
    j = (1, 0)
    ty = parse_type("X -> X")
    mv_i = model.transport(ty, env, env, {(ip.VSORT, "X"): i})
    mv_j = model.transport(ty, env, env, {(ip.VSORT, "X"): j})
    composed = tuple(j[i[x]] for x in range(2))
    mv_ji = model.transport(ty, env, env, {(ip.VSORT, "X"): composed})
    for v in range(4):
        assert mv_ji(v) == mv_j(mv_i(v))


def test_transport_on_arrows_is_conjugation(model):
    a = fm.FinSet(2)
    env = ip.type_env({"X": a})
    swap = (1, 0)
    ty = parse_type("X -> X")
    sem = model.interp_vtype(env, ty)
    mover = model.transport(ty, env, env, {(ip.VSORT, "X"): swap})
    for v in range(4):
        table = sem.table(v)
        conj = tuple(swap[table[swap[y]]] for y in range(2))  # i . f . i^-1
        assert sem.table(mover(v)) == conj


def test_transport_preserves_structure_on_homs(model):
    alg1, alg2 = model.algebras[1], model.algebras[2]
    env1 = ip.type_env({}, {"P": alg1})
    env2 = ip.type_env({}, {"P": alg2})
    iso = (1, 0)  # swaps the distinguished points
    ty = parse_type("^P -o ^P")
    mover = model.transport(ty, env1, env2, {(ip.CSORT, "P"): iso})
    src = model.interp_vtype(env1, ty)
    dst = model.interp_vtype(env2, ty)
    for h in range(src.size):
        assert dst.table(mover(h)) == tuple(
            iso[src.table(h)[iso[x]]] for x in range(2)
        )


def test_projection_at_registered_object_is_direct(free_model):
    model = free_model
    term = parse_term("Fun ^X => fun x:^X => x")
    j = Judgment((), None, term)
    fam = model.interp_term(j, ip.Env())
    poly = model.interp_vtype(ip.TypeEnv(), tc.typecheck(j))
    for k, alg in enumerate(model.algebras):
        got = model.project_poly(poly, fam, alg, "X", parse_type("^X -> ^X"), ip.TypeEnv())
        assert got == poly.fams[fam][k]


def test_projection_independent_of_isomorphism(free_model):
    # the interpreted algebra of !A is isomorphic, but not equal, to the
    # registered free algebra; both isomorphisms must give the same result
    model = free_model
    env = ip.type_env({"A": fm.FinSet(2)})
    bang_alg = model.interp_ctype(env, enc.encode_bang(VVar("A")))
    assert model.alg_index(bang_alg) is None
    con = model.constant_value("raise^e")
    scheme = model.constants["raise^e"][0]
    poly = model.interp_vtype(ip.TypeEnv(), scheme)
    got = model.project_poly(poly, con, bang_alg, "X", CVar("X"), ip.TypeEnv())
    assert got == bang_alg.raise_points[0]


def test_projection_out_of_bound(model):
    term = parse_term("Fun X => fun x:X => x")
    j = Judgment((), None, term)
    fam = model.interp_term(j, ip.Env())
    poly = model.interp_vtype(ip.TypeEnv(), tc.typecheck(j))
    with pytest.raises(ip.OutOfBoundError):
        model.project_poly(poly, fam, fm.FinSet(7), "X", parse_type("X -> X"), ip.TypeEnv())


def test_projection_from_polymorphic_computation_is_homomorphism(free_model):
    model = free_model
    ty = parse_type("forall X. X -> ^P")
    env = ip.type_env({}, {"P": model.algebras[1]})
    alg = model.interp_ctype(env, ty)
    sem = model.interp_vtype(env, ty)
    for k, target in enumerate(model.sets):
        comp_alg = model.interp_ctype(
            env.set(ip.VSORT, "X", target), parse_type("X -> ^P")
        )
        table = [sem.fams[f][k] for f in range(sem.size)]
        assert fm.is_homomorphism(table, alg, comp_alg)


# -- semantic substitution and opposite-relation properties -------------------


def test_semantic_substitution(model):
    from polyeff.kernel import subst_type

    env = ip.type_env({"B": fm.FinSet(2)}, {"P": model.algebras[1]})
    cases = [
        (parse_type("X -> X"), VVar("X"), parse_type("B -> B")),
        (parse_type("X -> ^P"), VVar("X"), parse_type("B -> B")),
        (parse_type("forall Y. Y -> X"), VVar("X"), VVar("B")),
        (parse_type("^Q -o ^P"), CVar("Q"), parse_type("B -> ^P")),
        (parse_type("forall ^Z. ^Z -> ^Q"), CVar("Q"), parse_type("B -> ^P")),
    ]
    for body, var, arg in cases:
        direct = model.interp_vtype(env, subst_type(body, var, arg))
        if isinstance(var, VVar):
            inner = env.set(ip.VSORT, var.name, fm.FinSet(model.interp_vtype(env, arg).size))
        else:
            inner = env.set(ip.CSORT, var.name, model.interp_ctype(env, arg))
        indirect = model.interp_vtype(inner, body)
        assert direct.size == indirect.size
        # and the relational layer agrees
        rho = ip.diag_relenv(env)
        arg_rel = model.interp_rel(rho, arg)
        sort = ip.VSORT if isinstance(var, VVar) else ip.CSORT
        left = model.interp_ctype(env, arg) if sort == ip.CSORT else fm.FinSet(arg_rel.left.size)
        rho_inner = rho.set(sort, var.name, left, left, arg_rel.pairs())
        assert (
            model.interp_rel(rho, subst_type(body, var, arg)).pairs()
            == model.interp_rel(rho_inner, body).pairs()
        )


def test_opposite_relation_property(model):
    env = ip.type_env({"B": fm.FinSet(2)}, {"P": model.algebras[1]})
    rho = ip.RelEnv(ip.TypeEnv(), ip.TypeEnv())
    rho = rho.set(ip.VSORT, "B", fm.FinSet(2), fm.FinSet(2), frozenset({(0, 1), (1, 1)}))
    rho = rho.set(ip.CSORT, "P", model.algebras[1], model.algebras[2],
                  frozenset({(0, 1), (1, 0)}))
    op = ip.RelEnv(
        rho.rho2, rho.rho1,
        tuple((k, frozenset((y, x) for x, y in r)) for k, r in rho.rels),
    )
    for src in ["B -> B", "B -> ^P", "^P -o ^P", "forall X. X -> B"]:
        ty = parse_type(src)
        direct = model.interp_rel(op, ty).pairs()
        flipped = frozenset((y, x) for x, y in model.interp_rel(rho, ty).pairs())
        assert direct == flipped


def test_env_must_cover_variables(model):
    j = Judgment((("x", VVar("B")),), None, Var("x"))
    with pytest.raises(ip.InterpError):
        model.interp_term(j, ip.Env(vvars={"B": fm.FinSet(2)}))


def test_linear_lambda_must_be_homomorphism(free_model):
    # interpreting a linear lambda checks membership among structure maps;
    # a stoup-typed body always passes
    model = free_model
    j = Judgment((), None, parse_term("lfun x:^A => x"))
    env = ip.Env(cvars={"A": model.algebras[1]})
    val = model.interp_term(j, env)
    sem = model.interp_vtype(env.types, tc.typecheck(j))
    assert sem.table(val) == (0, 1)


def test_value_dump_shapes(free_model):
    model = free_model
    j = Judgment((), None, parse_term("fun x:B => x"))
    ty = tc.typecheck(j)
    env = ip.Env(vvars={"B": fm.FinSet(2)})
    val = model.interp_term(j, env)
    sem = model.interp_vtype(env.types, ty)
    decoded = ip.decode_value(model, sem, val)
    assert decoded.kind == "fun"
    assert decoded.to_json() == [0, 1]
    blob = ip.dump_value(model, sem, val)
    assert '"value": [0, 1]' in blob


def test_transport_graph_is_the_graph_relation(model):
    # the canonical bijection induced by an environment isomorphism is the
    # unique function whose graph is the relational interpretation at the
    # graph environment
    a = fm.FinSet(2)
    for iso in [(0, 1), (1, 0)]:
        for src in ["X -> X", "X -> (X -> X)", "forall Y. Y -> X"]:
            ty = parse_type(src)
            env = ip.type_env({"X": a})
            mover = model.transport(ty, env, env, {(ip.VSORT, "X"): iso})
            graph = frozenset((x, iso[x]) for x in range(2))
            rho = ip.RelEnv(ip.TypeEnv(), ip.TypeEnv()).set(ip.VSORT, "X", a, a, graph)
            view = model.interp_rel(rho, ty)
            n = model.interp_vtype(env, ty).size
            assert view.pairs() == frozenset((v, mover(v)) for v in range(n))


def test_transport_graph_on_algebra_isomorphisms(model):
    alg1, alg2 = model.algebras[1], model.algebras[2]
    iso = (1, 0)
    for src in ["^P -o ^P", "B -> ^P"]:
        ty = parse_type(src)
        env1 = ip.type_env({"B": fm.FinSet(2)}, {"P": alg1})
        env2 = ip.type_env({"B": fm.FinSet(2)}, {"P": alg2})
        mover = model.transport(ty, env1, env2, {(ip.CSORT, "P"): iso})
        graph = frozenset((x, iso[x]) for x in range(2))
        rho = ip.RelEnv(env1, env2, ())
        rho = rho.set(ip.VSORT, "B", fm.FinSet(2), fm.FinSet(2),
                      frozenset((i, i) for i in range(2)))
        rho = rho.set(ip.CSORT, "P", alg1, alg2, graph)
        view = model.interp_rel(rho, ty)
        n = model.interp_vtype(env1, ty).size
        assert view.pairs() == frozenset((v, mover(v)) for v in range(n))


def test_non_parametric_families_are_rejected(model):
    poly = model.interp_vtype(ip.TypeEnv(), parse_type("forall ^X. ^X -> ^X"))
    junk = None
    for candidate in product(*(range(c.size) for c in poly.comps)):
        if candidate not in poly.fams:
            junk = candidate
            break
    assert junk is not None
    with pytest.raises(ip.InterpError):
        poly.encode(junk)


def test_hom_encoding_rejects_non_homomorphisms(model):
    env = ip.type_env({}, {"P": model.algebras[1], "Q": model.algebras[2]})
    sem = model.interp_vtype(env, parse_type("^P -o ^Q"))
    non_hom = (0, 0)  # must send the point of P (0) to the point of Q (1)
    assert non_hom not in sem.tables
    with pytest.raises(ip.InterpError):
        sem.encode(non_hom)
