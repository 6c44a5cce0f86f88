"""Desk-scale verification of the model's structural theorems.

Each verifier checks one named property exhaustively at a configured
bound and returns a ``VerificationReport``: monadic let laws, the free-
algebra universal property (and its cardinality consequence for ``!A``),
the three characterisations of the relational lifting, the
correspondence between algebraic operations, generic effects and
parametric elements, handler naturality, and the universal properties
of the definable computation types.

Verified statuses are deterministic given the configuration; every
counterexample report carries a witness that re-checks as a genuine
violation when replayed.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from . import encodings as enc
from . import finmodel as fm
from . import interp as ip
from . import typecheck as tc
from .kernel import (
    App,
    Arrow,
    CVar,
    ForallC,
    ForallV,
    Judgment,
    Lam,
    LinLam,
    Lolli,
    TyAppC,
    TyAppV,
    TyLamC,
    TyLamV,
    TypeExpr,
    Var,
    VVar,
    alpha_eq,
    classify_type,
    free_type_vars,
    free_type_vars_term,
)
from .randterms import TermGenerator
from .surface import parse_term, parse_type, print_type


@dataclass
class VerificationReport:
    theorem_id: str
    config: dict
    bound: int
    status: str = "verified"  # verified | counterexample | out-of-bound
    witness: Optional[dict] = None
    counts: Optional[dict] = None
    runtime_ms: float = 0.0

    def to_json(self, include_runtime: bool = True) -> str:
        data = {
            "theorem-id": self.theorem_id,
            "config": self.config,
            "bound": self.bound,
            "status": self.status,
        }
        if self.witness is not None:
            data["witness"] = self.witness
        if self.counts is not None:
            data["counts"] = self.counts
        if include_runtime:
            data["runtime-ms"] = round(self.runtime_ms, 1)
        return json.dumps(data, sort_keys=True)


def build_model(config: fm.ModelConfig, force_free: Optional[bool] = None) -> ip.Model:
    """A model with the configured monad's constants registered."""
    monad = config.monad_spec()
    consts = enc.register_effect_constants(config.monad, monad.exceptions)
    free = config.include_free_algebras if force_free is None else force_free
    return ip.Model(monad, config.bound, include_free_algebras=free, constants=consts)


def _report(theorem: str, model: ip.Model, t0: float, failures: list,
            counts: Optional[dict] = None, free: Optional[bool] = None) -> VerificationReport:
    cfg = {
        "monad": model.monad.key,
        "E": list(model.monad.exceptions),
        "free-algebras": bool(model._free_units) if free is None else free,
    }
    rep = VerificationReport(theorem, cfg, model.bound, counts=counts,
                             runtime_ms=(time.perf_counter() - t0) * 1000)
    if failures:
        rep.status = "counterexample"
        rep.witness = failures[0] if isinstance(failures[0], dict) else {"detail": str(failures[0])}
    return rep


def _out_of_bound(theorem: str, model: ip.Model, t0: float, detail: str) -> VerificationReport:
    rep = _report(theorem, model, t0, [])
    rep.status = "out-of-bound"
    rep.witness = {"detail": detail}
    return rep


# ---------------------------------------------------------------------------
# semantic equality over all environments


def iter_type_envs(model: ip.Model, vnames: Sequence[str], cnames: Sequence[str]):
    sets = model.sets
    algs = model.algebras
    for vobjs in itertools.product(sets, repeat=len(vnames)):
        for cobjs in itertools.product(algs, repeat=len(cnames)):
            yield ip.type_env(dict(zip(vnames, vobjs)), dict(zip(cnames, cobjs)))


def semantically_equal(
    model: ip.Model,
    gamma,
    delta,
    lhs,
    rhs,
    vnames: Sequence[str] = (),
    cnames: Sequence[str] = (),
) -> Optional[dict]:
    """Exhaustively compare two judgments' denotations; None, or a witness."""
    consts = model.constant_schemes
    ty_l = tc.synth(gamma, delta, lhs, consts)
    ty_r = tc.synth(gamma, delta, rhs, consts)
    if not alpha_eq(ty_l, ty_r):
        return {"detail": f"type mismatch: {print_type(ty_l)} vs {print_type(ty_r)}"}
    bindings = list(gamma) + ([delta] if delta is not None else [])
    for tyenv in iter_type_envs(model, vnames, cnames):
        dom_sizes = [model.interp_vtype(tyenv, ty).size for _, ty in bindings]
        for values in itertools.product(*(range(n) for n in dom_sizes)):
            tmenv = {name: v for (name, _), v in zip(bindings, values)}
            lv = model._eval(lhs, gamma, delta, tyenv, dict(tmenv))
            rv = model._eval(rhs, gamma, delta, tyenv, dict(tmenv))
            if lv != rv:
                return {
                    "env": {n: v for n, v in tmenv.items()},
                    "types": str(tyenv.items),
                    "lhs": lv,
                    "rhs": rv,
                }
    return None


# ---------------------------------------------------------------------------
# monadic let laws


def verify_bang_laws(model: ip.Model) -> VerificationReport:
    """The three let laws: substitution, stoup identity, homomorphism exchange."""
    t0 = time.perf_counter()
    if not model._free_units:
        return _out_of_bound("bang-laws", model, t0, "free algebras must be registered")
    bang_a = enc.encode_bang(VVar("A"))
    gamma_beta = (("t", VVar("A")), ("p", Arrow(VVar("A"), CVar("B"))))
    battery = []

    # substitution law: let x <= bang t in u  =  u[t/x]
    lhs = enc.elaborate_term(parse_term("let x <= bang t in p x"), gamma=gamma_beta)
    battery.append(("beta", gamma_beta, None, lhs, App(Var("p"), Var("t")), ("A",), ("B",)))
    lhs2 = enc.elaborate_term(parse_term("let x <= bang t in bang x"), gamma=gamma_beta)
    rhs2 = enc.elaborate_term(parse_term("bang t"), gamma=gamma_beta)
    battery.append(("beta-bang", gamma_beta, None, lhs2, rhs2, ("A",), ("B",)))

    # stoup identity: y = let x <= y in bang x, with y in the stoup at !A
    eta_rhs = enc.elaborate_term(parse_term("let x <= y in bang x"), delta=("y", bang_a))
    battery.append(("eta", (), ("y", bang_a), Var("y"), eta_rhs, ("A",), ()))

    # homomorphism exchange: u[let x <= s in t / y] = let x <= s in u[t/y]
    gamma_k = (("p", Arrow(VVar("A"), CVar("B"))), ("h", Lolli(CVar("B"), CVar("C"))))
    delta_k = ("z", bang_a)
    lhs_k = enc.elaborate_term(
        App(Var("h"), parse_term("let x <= z in p x")), gamma=gamma_k, delta=delta_k
    )
    rhs_k = enc.elaborate_term(
        parse_term("let x <= z in h (p x)"), gamma=gamma_k, delta=delta_k
    )
    battery.append(("kappa", gamma_k, delta_k, lhs_k, rhs_k, ("A",), ("B", "C")))

    failures = []
    for name, gamma, delta, lhs, rhs, vnames, cnames in battery:
        w = semantically_equal(model, gamma, delta, lhs, rhs, vnames, cnames)
        if w is not None:
            w["law"] = name
            failures.append(w)
    return _report("bang-laws", model, t0, failures, counts={"instances": len(battery)})


# ---------------------------------------------------------------------------
# free algebra


def _mediating_homs(model: ip.Model, fa: fm.Alg, eta, f, b: fm.Alg) -> list:
    return [h for h in fm.enumerate_homs(fa, b) if all(h[eta[x]] == f[x] for x in range(len(f)))]


def verify_free_algebra(model: ip.Model, max_a: int = 2, max_carrier: int = 3) -> VerificationReport:
    """Unique mediating homomorphisms out of T A, matching the let-based term."""
    t0 = time.perf_counter()
    if not model._free_units:
        return _out_of_bound("free-algebra", model, t0, "free algebras must be registered")
    failures = []
    checked = 0
    for a in range(max_a + 1):
        fa_idx = model.free_algebra_index(a)
        fa = model.algebras[fa_idx]
        eta = model._free_units[fa_idx]
        to_t, from_t = model.bang_bridge(a)
        gamma = (("f", Arrow(VVar("X"), CVar("Y"))),)
        mediator = LinLam(
            "y", enc.encode_bang(VVar("X")),
            enc.elaborate_term(parse_term("let x <= y in f x"), gamma=gamma, delta=("y", enc.encode_bang(VVar("X")))),
        )
        med_ty = tc.synth(gamma, None, mediator)
        for k, b in enumerate(model.algebras):
            if b.carrier.size > max_carrier:
                continue
            for f in itertools.product(range(b.carrier.size), repeat=a):
                homs = _mediating_homs(model, fa, eta, f, b)
                checked += 1
                if len(homs) != 1:
                    failures.append({"a": a, "algebra": k, "f": list(f), "mediators": len(homs)})
                    continue
                # the unique mediator is the denotation of the let-based term
                tyenv = ip.type_env({"X": fm.FinSet(a)}, {"Y": b})
                fsem = model.interp_vtype(tyenv, Arrow(VVar("X"), CVar("Y")))
                fval = fsem.encode(list(f))
                hval = model._eval(mediator, gamma, None, tyenv, {"f": fval})
                hsem = model.interp_vtype(tyenv, med_ty)
                table = hsem.table(hval)
                concrete = homs[0]
                if any(table[from_t[z]] != concrete[z] for z in range(fa.carrier.size)):
                    failures.append({"a": a, "algebra": k, "f": list(f), "detail": "term mediator differs"})
    return _report("free-algebra", model, t0, failures, counts={"instances": checked})


def free_algebra_negative_control(model: ip.Model) -> VerificationReport:
    """Substituting a non-free algebra for T A must break unique mediation."""
    t0 = time.perf_counter()
    a = 2
    if model.monad.key == "identity":
        fake = fm.Alg(model.monad, fm.FinSet(1))
        eta = (0, 0)
    elif model.monad.key == "exception":
        fake = fm.Alg(model.monad, fm.FinSet(2), raise_points=(0,) * model.monad.n_exc)
        eta = (0, 1)
    else:
        fake = fm.Alg(model.monad, fm.FinSet(2), or_table=((0, 1), (1, 1)))
        eta = (0, 1)
    for k, b in enumerate(model.algebras):
        if b.carrier.size > 3:
            continue
        for f in itertools.product(range(b.carrier.size), repeat=a):
            homs = _mediating_homs(model, fake, eta, f, b)
            if len(homs) != 1:
                rep = _report("free-algebra-negative-control", model, t0, [])
                rep.status = "counterexample"
                rep.witness = {
                    "fake-carrier": fake.carrier.size,
                    "algebra": k,
                    "f": list(f),
                    "mediators": len(homs),
                }
                return rep
    rep = _report("free-algebra-negative-control", model, t0, [])
    rep.status = "counterexample"  # expected to find one; not finding one is itself notable
    rep.witness = {"detail": "no violation found: control failed"}
    return rep


def replay_negative_control(model: ip.Model, rep: VerificationReport) -> bool:
    """Re-check a negative-control witness as a genuine violation."""
    w = rep.witness or {}
    if "algebra" not in w:
        return False
    if model.monad.key == "exception":
        fake = fm.Alg(model.monad, fm.FinSet(2), raise_points=(0,) * model.monad.n_exc)
        eta = (0, 1)
    elif model.monad.key == "identity":
        fake = fm.Alg(model.monad, fm.FinSet(1))
        eta = (0, 0)
    else:
        fake = fm.Alg(model.monad, fm.FinSet(2), or_table=((0, 1), (1, 1)))
        eta = (0, 1)
    b = model.algebras[w["algebra"]]
    homs = _mediating_homs(model, fake, eta, tuple(w["f"]), b)
    return len(homs) == w["mediators"] and len(homs) != 1


def verify_bang_cardinality(model: ip.Model, sizes: Sequence[int] = (0, 1, 2)) -> VerificationReport:
    """|[[!A]]| = |T A| with the projection-at-the-free-algebra bijection."""
    t0 = time.perf_counter()
    if not model._free_units:
        return _out_of_bound("bang-cardinality", model, t0, "free algebras must be registered")
    failures = []
    counts = {}
    for a in sizes:
        env = ip.TypeEnv().set(ip.VSORT, "A", fm.FinSet(a))
        poly = model.interp_vtype(env, enc.encode_bang(VVar("A")))
        ta = model.monad.apply(fm.FinSet(a)).size
        counts[f"|A|={a}"] = poly.size
        if poly.size != ta:
            failures.append({"a": a, "families": poly.size, "TA": ta})
            continue
        try:
            model.bang_bridge(a)  # raises if the canonical map is not bijective
        except ip.InterpError as exc:
            failures.append({"a": a, "detail": str(exc)})
    return _report("bang-cardinality", model, t0, failures, counts=counts)


# ---------------------------------------------------------------------------
# relational lifting


def lifted_rel(model: ip.Model, r: frozenset, a: int, b: int) -> frozenset:
    """The lifting of R along eta-pairs: smallest admissible relation on T A x T B."""
    fa_i, fb_i = model.free_algebra_index(a), model.free_algebra_index(b)
    fa, fb = model.algebras[fa_i], model.algebras[fb_i]
    eta_a, eta_b = model._free_units[fa_i], model._free_units[fb_i]
    base = frozenset((eta_a[x], eta_b[y]) for x, y in r)
    rel = fm.Rel(fa.carrier, fb.carrier, base)
    return fm.admissible_closure(rel, fa, fb).pairs


def verify_rel_lifting(model: ip.Model, max_size: int = 2) -> VerificationReport:
    """Three characterisations of the lifting agree for every relation."""
    t0 = time.perf_counter()
    if not model._free_units:
        return _out_of_bound("rel-lifting", model, t0, "free algebras must be registered")
    failures = []
    checked = 0
    bang_x = enc.encode_bang(VVar("X"))
    for a in range(max_size + 1):
        for b in range(max_size + 1):
            fa_i, fb_i = model.free_algebra_index(a), model.free_algebra_index(b)
            fa, fb = model.algebras[fa_i], model.algebras[fb_i]
            eta_a, eta_b = model._free_units[fa_i], model._free_units[fb_i]
            to_a, _ = model.bang_bridge(a)
            to_b, _ = model.bang_bridge(b)
            for r in fm.enumerate_set_rels(fm.FinSet(a), fm.FinSet(b)):
                checked += 1
                via_closure = lifted_rel(model, r, a, b)
                # polymorphic-definition lifting, moved along the bijections
                rho = ip.RelEnv(ip.TypeEnv(), ip.TypeEnv()).set(
                    ip.VSORT, "X", fm.FinSet(a), fm.FinSet(b), r
                )
                view = model.interp_rel(rho, bang_x)
                via_interp = frozenset(
                    (to_a[p], to_b[q]) for p, q in view.pairs()
                )
                # image of the functor applied to the span
                rl = sorted(r)
                rset = fm.FinSet(len(rl))
                p1 = [x for x, _ in rl]
                p2 = [y for _, y in rl]
                tp1 = model.monad.tmap(p1, rset, fm.FinSet(a))
                tp2 = model.monad.tmap(p2, rset, fm.FinSet(b))
                image = frozenset(zip(tp1, tp2))
                via_image = fm.admissible_closure(
                    fm.Rel(fa.carrier, fb.carrier, image), fa, fb
                ).pairs
                if not (via_closure == via_interp == via_image):
                    failures.append({
                        "a": a, "b": b, "R": sorted(r),
                        "closure": sorted(via_closure),
                        "interp": sorted(via_interp),
                        "image": sorted(via_image),
                    })
    # adjoint characterisation: (!R -o Q)(f,g) iff (R -> Q)(f.eta, g.eta)
    for a in range(max_size + 1):
        for b in range(max_size + 1):
            fa = model.algebras[model.free_algebra_index(a)]
            fb = model.algebras[model.free_algebra_index(b)]
            eta_a = model._free_units[model.free_algebra_index(a)]
            eta_b = model._free_units[model.free_algebra_index(b)]
            for r in fm.enumerate_set_rels(fm.FinSet(a), fm.FinSet(b)):
                bang_r = lifted_rel(model, r, a, b)
                # target algebras range over the bound proper
                bounded = [x for x in model.algebras if x.carrier.size <= model.bound]
                for i, ua in enumerate(bounded):
                    for j, ub in enumerate(bounded):
                        for q in fm.enumerate_alg_rels(ua, ub):
                            for f in fm.enumerate_homs(fa, ua):
                                for g in fm.enumerate_homs(fb, ub):
                                    lhs = all((f[z], g[w]) in q for z, w in bang_r)
                                    rhs = all((f[eta_a[x]], g[eta_b[y]]) in q for x, y in r)
                                    checked += 1
                                    if lhs != rhs:
                                        failures.append({
                                            "a": a, "b": b, "R": sorted(r), "Q": sorted(q),
                                            "algs": [i, j], "f": list(f), "g": list(g),
                                        })
    return _report("rel-lifting", model, t0, failures, counts={"instances": checked})


# ---------------------------------------------------------------------------
# algebraic operations / generic effects / parametric elements


def nary_op_type(n: int) -> TypeExpr:
    ty: TypeExpr = CVar("X")
    for _ in range(n):
        ty = Arrow(CVar("X"), ty)
    return ForallC("X", ty)


def enumerate_parametric_elements(model: ip.Model, poly_type: TypeExpr) -> list[ip.SemValue]:
    """All parametric inhabitants of a quantified type, decoded."""
    poly = model.interp_vtype(ip.TypeEnv(), poly_type)
    if not isinstance(poly, ip.PolySem):
        raise ip.InterpError("expected a quantified type")
    return [ip.decode_value(model, poly, i) for i in range(poly.size)]


def _nary_tables(model: ip.Model, alg: fm.Alg, n: int):
    """All n-ary operations on a carrier, as tuples over argument tuples."""
    args = list(itertools.product(range(alg.carrier.size), repeat=n))
    for tbl in itertools.product(range(alg.carrier.size), repeat=len(args)):
        yield dict(zip(args, tbl))


def _is_natural_square(theta_d, theta_c, hom, n: int) -> bool:
    for args in list(theta_d.keys()):
        mapped = tuple(hom[x] for x in args)
        if theta_c[mapped] != hom[theta_d[args]]:
            return False
    return True


def enumerate_natural_transformations(model: ip.Model, n: int) -> list[tuple]:
    """Families of n-ary operations natural in every registered homomorphism."""
    algs = model.algebras
    order = sorted(range(len(algs)), key=lambda i: (algs[i].carrier.size, i))
    homs = {}
    for i in range(len(algs)):
        for j in range(len(algs)):
            homs[(i, j)] = fm.enumerate_homs(algs[i], algs[j])
    partial = [dict()]
    for pos, k in enumerate(order):
        cands = []
        for theta in _nary_tables(model, algs[k], n):
            if all(_is_natural_square(theta, theta, h, n) for h in homs[(k, k)]):
                cands.append(theta)
        grown = []
        for asg in partial:
            for theta in cands:
                ok = True
                for kp in asg:
                    for h in homs[(kp, k)]:
                        if not _is_natural_square(asg[kp], theta, h, n):
                            ok = False
                            break
                    if ok:
                        for h in homs[(k, kp)]:
                            if not _is_natural_square(theta, asg[kp], h, n):
                                ok = False
                                break
                    if not ok:
                        break
                if ok:
                    g = dict(asg)
                    g[k] = theta
                    grown.append(g)
        partial = grown
        if not partial:
            break
    out = []
    for asg in partial:
        out.append(tuple(tuple(sorted(asg[k].items())) for k in range(len(algs))))
    return sorted(out)


def _generic_to_nt(model: ip.Model, gen: int, n: int) -> tuple:
    """theta_B(args) = structure-map of B applied to T(args) at the effect."""
    fam = []
    for alg in model.algebras:
        xi = fm.em_map_of(alg)
        theta = {}
        for args in itertools.product(range(alg.carrier.size), repeat=n):
            tf = model.monad.tmap(list(args), fm.FinSet(n), alg.carrier)
            theta[args] = xi[tf[gen]]
        fam.append(tuple(sorted(theta.items())))
    return tuple(fam)


def verify_algop_correspondence(model: ip.Model, n: int) -> VerificationReport:
    """Natural transformations, effects in T(n), and parametric elements agree."""
    t0 = time.perf_counter()
    if not model._free_units:
        return _out_of_bound("algop-correspondence", model, t0, "free algebras must be registered")
    failures = []
    tn = model.monad.apply(fm.FinSet(n)).size
    nts = enumerate_natural_transformations(model, n)
    poly = model.interp_vtype(ip.TypeEnv(), nary_op_type(n))
    counts = {"natural-transformations": len(nts), "generic-effects": tn,
              "parametric-elements": poly.size}
    if not (len(nts) == tn == poly.size):
        failures.append({"detail": "cardinalities differ", **counts})
        return _report("algop-correspondence", model, t0, failures, counts=counts)

    # kappa -> theta: apply the family componentwise; must land in the NT set
    kappa_to_nt = {}
    for f in range(poly.size):
        fam = []
        for k, alg in enumerate(model.algebras):
            comp = poly.comps[k]
            theta = {}
            for args in itertools.product(range(alg.carrier.size), repeat=n):
                cur = poly.fams[f][k]
                sem = comp
                for x in args:
                    cur = ip.apply_sem(sem, cur, x)
                    sem = sem.cod if hasattr(sem, "cod") else sem
                theta[args] = cur
            fam.append(tuple(sorted(theta.items())))
        fam = tuple(fam)
        if fam not in nts:
            failures.append({"detail": "family is not a natural transformation", "element": f})
        kappa_to_nt[f] = fam
    # injectivity makes the map a bijection on equal cardinalities
    if len(set(kappa_to_nt.values())) != poly.size:
        failures.append({"detail": "family-to-transformation map is not injective"})

    # gen -> theta -> gen roundtrip: evaluate at the free algebra on n
    fa_idx = model.free_algebra_index(n)
    eta = model._free_units[fa_idx]
    for gen in range(tn):
        fam = _generic_to_nt(model, gen, n)
        if fam not in nts:
            failures.append({"detail": "generic effect does not induce a transformation", "gen": gen})
            continue
        theta_fa = dict(fam[fa_idx])
        back = theta_fa[tuple(eta)]
        if back != gen:
            failures.append({"detail": "roundtrip differs", "gen": gen, "back": back})
    gen_images = {_generic_to_nt(model, g, n) for g in range(tn)}
    if gen_images != set(nts):
        failures.append({"detail": "generic effects do not exhaust the transformations"})

    if model.monad.key == "powerset":
        # the binary choice family is natural in every semilattice homomorphism
        or_fam = tuple(
            tuple(sorted({(x, y): alg.op_or(x, y)
                          for x in range(alg.carrier.size)
                          for y in range(alg.carrier.size)}.items()))
            for alg in model.algebras
        )
        if n == 2 and or_fam not in nts:
            failures.append({"detail": "binary choice fails naturality"})
    return _report("algop-correspondence", model, t0, failures, counts=counts)


# ---------------------------------------------------------------------------
# handler


def _handle_table(model: ip.Model, a: int, e_idx: int):
    ta = model.monad.apply(fm.FinSet(a)).size
    raise_elt = a + e_idx
    return {(p, q): (q if p == raise_elt else p) for p in range(ta) for q in range(ta)}


def verify_handler(model: ip.Model, max_size: int = 2) -> VerificationReport:
    """The exception handler is a homomorphism, natural, and parametric."""
    t0 = time.perf_counter()
    if model.monad.key != "exception":
        return _out_of_bound("handler", model, t0, "handler verification needs the exception monad")
    if not model._free_units:
        return _out_of_bound("handler", model, t0, "free algebras must be registered")
    failures = []
    checked = 0
    denotation_skipped = False
    for e_idx, e in enumerate(model.monad.exceptions):
        # case split reproduced exactly
        for a in range(max_size + 1):
            tbl = _handle_table(model, a, e_idx)
            ta = model.monad.apply(fm.FinSet(a)).size
            for p in range(ta):
                for q in range(ta):
                    want = q if p == a + e_idx else p
                    checked += 1
                    if tbl[(p, q)] != want:
                        failures.append({"law": "case-split", "e": e, "a": a, "p": p, "q": q})
        # homomorphism from the squared free algebra
        for a in range(max_size + 1):
            fa = model.algebras[model.free_algebra_index(a)]
            prod = fm.product_alg(fa, fa)
            tbl = _handle_table(model, a, e_idx)
            n = fa.carrier.size
            table = [tbl[(i // n, i % n)] for i in range(n * n)]
            checked += 1
            if not fm.is_homomorphism(table, prod, fa):
                failures.append({"law": "homomorphism", "e": e, "a": a})
        # naturality in the underlying set
        for a in range(max_size + 1):
            for b in range(max_size + 1):
                ha, hb = _handle_table(model, a, e_idx), _handle_table(model, b, e_idx)
                for f in itertools.product(range(b), repeat=a):
                    tf = model.monad.tmap(list(f), fm.FinSet(a), fm.FinSet(b))
                    for p in range(len(tf)):
                        for q in range(len(tf)):
                            checked += 1
                            if hb[(tf[p], tf[q])] != tf[ha[(p, q)]]:
                                failures.append({"law": "naturality", "e": e, "a": a, "b": b,
                                                 "f": list(f), "p": p, "q": q})
        # relation preservation against every lifted relation
        for a in range(max_size + 1):
            for b in range(max_size + 1):
                ha, hb = _handle_table(model, a, e_idx), _handle_table(model, b, e_idx)
                for r in fm.enumerate_set_rels(fm.FinSet(a), fm.FinSet(b)):
                    br = lifted_rel(model, r, a, b)
                    for p1, p2 in br:
                        for q1, q2 in br:
                            checked += 1
                            if (ha[(p1, q1)], hb[(p2, q2)]) not in br:
                                failures.append({"law": "parametricity", "e": e, "a": a, "b": b,
                                                 "R": sorted(r)})
        # extra assurance when tractable: the interpreted constant inhabits
        # its polymorphic type and agrees with the case-split table
        name = f"handle^{e}"
        val = None
        if name in model.constants:
            try:
                val = model.constant_value(name)  # encoding asserts membership
            except ip.OutOfBoundError:
                denotation_skipped = True
            except ip.InterpError as exc:
                failures.append({"law": "membership", "e": e, "detail": str(exc)})
                continue
        if val is not None:
            for a in range(min(max_size, model.bound) + 1):
                to_t, from_t = model.bang_bridge(a)
                scheme = model.constants[name][0]
                poly = model.interp_vtype(ip.TypeEnv(), scheme)
                comp = poly.comps[a]
                i0, i1 = model.two_values()
                tbl = _handle_table(model, a, e_idx)
                for p in range(len(to_t)):
                    for q in range(len(to_t)):
                        u_table = [0, 0]
                        u_table[i0], u_table[i1] = from_t[p], from_t[q]
                        u = comp.dom.encode(u_table)
                        got = to_t[comp.apply(poly.fams[val][a], u)]
                        checked += 1
                        if got != tbl[(p, q)]:
                            failures.append({"law": "denotation", "e": e, "a": a, "p": p, "q": q})
    counts = {"instances": checked}
    if denotation_skipped:
        counts["denotation-check"] = "out-of-bound (concrete membership still checked)"
    return _report("handler", model, t0, failures, counts=counts)


# ---------------------------------------------------------------------------
# universal properties of the definable computation types


def verify_encoding_props(model: ip.Model) -> VerificationReport:
    """Initial object, binary coproducts, the wrapping isomorphism, and the
    function-space decomposition through ``!``.

    The model must have free algebras registered: coproduct mediation is
    only unique once the enumeration contains algebras rich enough to cut
    non-standard families out of the encoded sum.
    """
    t0 = time.perf_counter()
    failures = []
    checked = 0
    if not model._free_units:
        return _out_of_bound("encoding-props", model, t0, "free algebras must be registered")

    # initiality of the empty computation type
    zero_ty = enc.encode_comp_type("ZeroC")
    zero_alg = model.interp_ctype(ip.TypeEnv(), zero_ty)
    for k, b in enumerate(model.algebras):
        homs = fm.enumerate_homs(zero_alg, b)
        checked += 1
        if len(homs) != 1:
            failures.append({"law": "initiality", "algebra": k, "homs": len(homs)})

    # binary coproducts: unique mediation through the injections
    oplus_ty = enc.encode_comp_type("Oplus", (CVar("A"), CVar("B")))
    inl_t = LinLam("a", CVar("A"), enc.oplus_inl(CVar("A"), CVar("B"), Var("a")))
    inr_t = LinLam("b", CVar("B"), enc.oplus_inr(CVar("A"), CVar("B"), Var("b")))
    small = [(i, a) for i, a in enumerate(model.algebras) if a.carrier.size <= model.bound]
    for ia, alg_a in small:
        for ib, alg_b in small:
            tyenv = ip.type_env({}, {"A": alg_a, "B": alg_b})
            try:
                sum_alg = model.interp_ctype(tyenv, oplus_ty)
            except ip.OutOfBoundError as exc:
                return _out_of_bound("encoding-props", model, t0, str(exc))
            inl_v = model._eval(inl_t, (), None, tyenv, {})
            inr_v = model._eval(inr_t, (), None, tyenv, {})
            inl_sem = model.interp_vtype(tyenv, Lolli(CVar("A"), oplus_ty))
            inr_sem = model.interp_vtype(tyenv, Lolli(CVar("B"), oplus_ty))
            inl_tbl = inl_sem.table(inl_v)
            inr_tbl = inr_sem.table(inr_v)
            for ic, alg_c in enumerate(model.algebras):
                for u in fm.enumerate_homs(alg_a, alg_c):
                    for v in fm.enumerate_homs(alg_b, alg_c):
                        meds = [
                            h
                            for h in fm.enumerate_homs(sum_alg, alg_c)
                            if all(h[inl_tbl[x]] == u[x] for x in range(alg_a.carrier.size))
                            and all(h[inr_tbl[y]] == v[y] for y in range(alg_b.carrier.size))
                        ]
                        checked += 1
                        if len(meds) != 1:
                            failures.append({"law": "coproduct", "algs": [ia, ib, ic],
                                             "u": list(u), "v": list(v), "mediators": len(meds)})

    # wrapping isomorphism for every algebra within the bound
    for k, alg in [(i, a) for i, a in enumerate(model.algebras) if a.carrier.size <= model.bound]:
        cfwd, cbwd = enc.comp_iso_terms(CVar("A"))
        tyenv = ip.type_env({}, {"A": alg})
        fv = model._eval(cfwd, (), None, tyenv, {})
        bv = model._eval(cbwd, (), None, tyenv, {})
        fsem = model.interp_vtype(tyenv, tc.synth((), None, cfwd))
        bsem = model.interp_vtype(tyenv, tc.synth((), None, cbwd))
        n = alg.carrier.size
        checked += 1
        if not all(bsem.apply(bv, fsem.apply(fv, x)) == x for x in range(n)):
            failures.append({"law": "wrap-iso-left", "algebra": k})
        wrapped = bsem.dom
        checked += 1
        if not all(fsem.apply(fv, bsem.apply(bv, w)) == w for w in range(wrapped.size)):
            failures.append({"law": "wrap-iso-right", "algebra": k})

    # function-space decomposition through !
    fwd, bwd = enc.girard_iso_terms(VVar("A"), CVar("B"))
    for alg in model.algebras:
        tyenv = ip.type_env({"A": fm.FinSet(2)}, {"B": alg})
        fv = model._eval(fwd, (), None, tyenv, {})
        bv = model._eval(bwd, (), None, tyenv, {})
        fsem = model.interp_vtype(tyenv, tc.synth((), None, fwd))
        bsem = model.interp_vtype(tyenv, tc.synth((), None, bwd))
        checked += 2
        if not all(fsem.apply(fv, bsem.apply(bv, g)) == g for g in range(fsem.cod.size)):
            failures.append({"law": "decomposition-left", "carrier": alg.carrier.size})
        if not all(bsem.apply(bv, fsem.apply(fv, f)) == f for f in range(bsem.cod.size)):
            failures.append({"law": "decomposition-right", "carrier": alg.carrier.size})
    return _report("encoding-props", model, t0, failures, counts={"instances": checked})


# ---------------------------------------------------------------------------
# monad laws and relation axioms


def verify_monad_laws(max_size: int = 4) -> VerificationReport:
    """Kleisli laws for all three monad configurations, exhaustively."""
    t0 = time.perf_counter()
    failures = []
    checked = 0
    specs = [
        fm.MonadSpec("identity"),
        fm.MonadSpec("exception", ("e",)),
        fm.MonadSpec("exception", ("e1", "e2")),
        fm.MonadSpec("powerset"),
    ]
    for spec in specs:
        rep = fm.check_monad_laws(spec, max_size)
        checked += rep.checked
        for f in rep.failures:
            failures.append({"monad": spec.key, "E": list(spec.exceptions), "detail": f})
    out = VerificationReport(
        "monad-laws", {"monads": [s.key for s in specs], "max-size": max_size}, max_size,
        counts={"instances": checked}, runtime_ms=(time.perf_counter() - t0) * 1000,
    )
    if failures:
        out.status = "counterexample"
        out.witness = failures[0]
    return out


def verify_rel_axioms(model: ip.Model) -> VerificationReport:
    """Diagonals admissible, reindexing and intersection closure, carrier containment."""
    t0 = time.perf_counter()
    failures = []
    checked = 0
    sets = model.sets
    algs = [a for a in model.algebras if a.carrier.size <= model.bound]

    # diagonals
    for s in sets:
        checked += 1
        if frozenset((i, i) for i in range(s.size)) not in fm.enumerate_set_rels(s, s):
            failures.append({"axiom": "R1", "object": f"set:{s.size}"})
    for k, a in enumerate(algs):
        diag = frozenset((i, i) for i in range(a.carrier.size))
        checked += 1
        if not fm.rel_carries_subalgebra(fm.Rel(a.carrier, a.carrier, diag), a, a):
            failures.append({"axiom": "R1", "object": f"alg:{k}"})

    # reindexing on sets
    for a1 in sets:
        for a2 in sets:
            for b1 in sets:
                for b2 in sets:
                    fs = list(itertools.product(range(a2.size), repeat=a1.size))
                    gs = list(itertools.product(range(b2.size), repeat=b1.size))
                    rels = fm.enumerate_set_rels(a2, b2)
                    allowed = set(fm.enumerate_set_rels(a1, b1))
                    for f in fs:
                        for g in gs:
                            for r in rels:
                                pre = fm.preimage(f, g, fm.Rel(a2, b2, r))
                                checked += 1
                                if pre.pairs not in allowed:
                                    failures.append({"axiom": "R2", "kind": "set"})
    # reindexing on algebras
    for ka, a1 in enumerate(algs):
        for kb, a2 in enumerate(algs):
            homs_a = fm.enumerate_homs(a1, a2)
            for kc, b1 in enumerate(algs):
                for kd, b2 in enumerate(algs):
                    homs_b = fm.enumerate_homs(b1, b2)
                    for q in fm.enumerate_alg_rels(a2, b2):
                        for f in homs_a:
                            for g in homs_b:
                                pre = fm.preimage(f, g, fm.Rel(a2.carrier, b2.carrier, q))
                                checked += 1
                                if not fm.rel_carries_subalgebra(pre, a1, b1):
                                    failures.append({
                                        "axiom": "R2", "kind": "alg",
                                        "objects": [ka, kb, kc, kd], "Q": sorted(q),
                                    })

    # intersections (binary plus the full relation as the empty intersection)
    for a in sets:
        for b in sets:
            rels = fm.enumerate_set_rels(a, b)
            allowed = set(rels)
            full = frozenset((x, y) for x in range(a.size) for y in range(b.size))
            checked += 1
            if full not in allowed:
                failures.append({"axiom": "R3", "kind": "set-full"})
            for r1 in rels:
                for r2 in rels:
                    checked += 1
                    if (r1 & r2) not in allowed:
                        failures.append({"axiom": "R3", "kind": "set"})
    for ka, a in enumerate(algs):
        for kb, b in enumerate(algs):
            rels = fm.enumerate_alg_rels(a, b)
            full = frozenset(
                (x, y) for x in range(a.carrier.size) for y in range(b.carrier.size)
            )
            checked += 1
            if not fm.rel_carries_subalgebra(fm.Rel(a.carrier, b.carrier, full), a, b):
                failures.append({"axiom": "R3", "kind": "alg-full", "objects": [ka, kb]})
            for q1 in rels:
                for q2 in rels:
                    checked += 1
                    if not fm.rel_carries_subalgebra(
                        fm.Rel(a.carrier, b.carrier, q1 & q2), a, b
                    ):
                        failures.append({"axiom": "R3", "kind": "alg", "objects": [ka, kb]})

    # algebra relations are carrier relations
    for ka, a in enumerate(algs):
        for kb, b in enumerate(algs):
            for q in fm.enumerate_alg_rels(a, b):
                checked += 1
                if not all(
                    0 <= x < a.carrier.size and 0 <= y < b.carrier.size for x, y in q
                ):
                    failures.append({"axiom": "R4", "objects": [ka, kb]})
    return _report("relation-axioms", model, t0, failures, counts={"instances": checked})


# ---------------------------------------------------------------------------
# identity extension and relational invariance


def identity_extension_battery() -> list[TypeExpr]:
    """Types (depth <= 3) over the ambient variables X, Y, ^P, ^Q."""
    x, y, p, q = VVar("X"), VVar("Y"), CVar("P"), CVar("Q")
    return [
        x,
        p,
        Arrow(x, y),
        Arrow(x, x),
        Arrow(p, p),
        Arrow(x, p),
        Lolli(p, q),
        Lolli(p, p),
        Arrow(Arrow(x, p), p),
        Arrow(Arrow(x, x), x),
        ForallV("Z", Arrow(VVar("Z"), VVar("Z"))),
        ForallV("Z", Arrow(VVar("Z"), x)),
        ForallC("Z", Arrow(CVar("Z"), CVar("Z"))),
        enc.encode_comp_type("ZeroC"),
        enc.encode_bang(x),
        enc.encode_value_type("Unit"),
        enc.encode_num(2),
        enc.encode_value_type("Prod", (x, y)),
        enc.encode_value_type("Sum", (x, y)),
        enc.encode_value_type("ExistsV", ("Z", Arrow(VVar("Z"), x))),
        enc.encode_comp_type("Oplus", (p, q)),
        enc.encode_comp_type("Copower", (x, p)),
        enc.encode_comp_type("UnitC"),
        enc.encode_value_type("Mu", ("Z", VVar("Z"))),
    ]


def verify_identity_extension(model: ip.Model, battery: Optional[Sequence[TypeExpr]] = None) -> VerificationReport:
    """Relational interpretation at diagonal environments is the diagonal."""
    t0 = time.perf_counter()
    battery = list(battery) if battery is not None else identity_extension_battery()
    failures = []
    env_sets = [s for s in model.sets if s.size > 0]
    base_envs = []
    for xv in env_sets[:2]:
        for pv in model.algebras[:2]:
            base_envs.append(
                ip.type_env({"X": xv, "Y": fm.FinSet(2)}, {"P": pv, "Q": model.algebras[0]})
            )
    for ty in battery:
        for env in base_envs:
            view = model.interp_rel(ip.diag_relenv(env), ty)
            size = model.interp_vtype(env, ty).size
            got = view.pairs()
            want = frozenset((i, i) for i in range(size))
            if got != want:
                failures.append({"type": print_type(ty),
                                 "extra": sorted(got - want), "missing": sorted(want - got)})
                break
    return _report("identity-extension", model, t0, failures,
                   counts={"types": len(battery)})


def _relenv_space(model: ip.Model, vnames, cnames):
    per_var = []
    for name in vnames:
        triples = []
        for i, a in enumerate(model.sets):
            for j, b in enumerate(model.sets):
                for r in model.rels_for_pair(ip.VSORT, i, j):
                    triples.append((ip.VSORT, name, a, b, r))
        per_var.append(triples)
    for name in cnames:
        triples = []
        for i, a in enumerate(model.algebras):
            for j, b in enumerate(model.algebras):
                for r in model.rels_for_pair(ip.CSORT, i, j):
                    triples.append((ip.CSORT, name, a, b, r))
        per_var.append(triples)
    return per_var


def verify_abstraction(
    model: ip.Model,
    seed: int = 17,
    n_terms: int = 100,
    max_relenvs: int = 40,
    max_value_envs: int = 60,
) -> VerificationReport:
    """Relational invariance on seeded judgments, plus the stoup
    homomorphism property.

    Relational environments and value environments are enumerated in a
    deterministic order and capped, so the run is reproducible.
    """
    t0 = time.perf_counter()
    gen = TermGenerator(seed, interp_safe=True)
    failures = []
    hom_checked = 0
    skipped = 0
    for _ in range(n_terms):
        j = gen.random_judgment()
        vnames = sorted({v.name for v in _judgment_ftv(j) if isinstance(v, VVar)})
        cnames = sorted({v.name for v in _judgment_ftv(j) if isinstance(v, CVar)})
        space = _relenv_space(model, vnames, cnames)
        combos = itertools.islice(itertools.product(*space), max_relenvs)
        bindings = list(j.gamma) + ([j.delta] if j.delta is not None else [])
        for combo in combos:
            rho = ip.RelEnv(ip.TypeEnv(), ip.TypeEnv())
            for sort, name, a, b, r in combo:
                rho = rho.set(sort, name, a, b, r)
            try:
                binding_rels = [model.interp_rel(rho, ty) for _, ty in bindings]
                pair_lists = [sorted(view.pairs()) for view in binding_rels]
            except ip.OutOfBoundError:
                continue
            count = 0
            for values in itertools.product(*pair_lists):
                if count >= max_value_envs:
                    break
                count += 1
                env1 = {name: v1 for (name, _), (v1, _) in zip(bindings, values)}
                env2 = {name: v2 for (name, _), (_, v2) in zip(bindings, values)}
                try:
                    l = model._eval(j.subject, j.gamma, j.delta, rho.rho1, env1)
                    r = model._eval(j.subject, j.gamma, j.delta, rho.rho2, env2)
                except ip.OutOfBoundError:
                    skipped += 1
                    continue
                result_rel = model.interp_rel(rho, j.ascription)
                if not result_rel.contains(l, r):
                    failures.append({
                        "term": str(j.subject), "type": print_type(j.ascription),
                        "lhs": l, "rhs": r,
                    })
                    break
            if failures:
                break
        if failures:
            break
        # stoup judgments: the induced map is a structure homomorphism
        if j.delta is not None:
            name, sty = j.delta
            env_combos = itertools.islice(
                iter_type_envs(model, vnames, cnames), 4
            )
            for tyenv in env_combos:
                dom_alg = model.interp_ctype(tyenv, sty)
                cod_alg = model.interp_ctype(tyenv, j.ascription)
                others = [(n, ty) for n, ty in j.gamma]
                sizes = [model.interp_vtype(tyenv, ty).size for _, ty in others]
                for values in itertools.islice(
                    itertools.product(*(range(n) for n in sizes)), 6
                ):
                    base = {n: v for (n, _), v in zip(others, values)}
                    table = []
                    for d in range(dom_alg.carrier.size):
                        tm = dict(base)
                        tm[name] = d
                        table.append(model._eval(j.subject, j.gamma, j.delta, tyenv, tm))
                    hom_checked += 1
                    if not fm.is_homomorphism(table, dom_alg, cod_alg):
                        failures.append({"term": str(j.subject), "law": "homomorphism"})
                        break
                if failures:
                    break
        if failures:
            break
    return _report("abstraction", model, t0, failures,
                   counts={"terms": n_terms, "hom-instances": hom_checked,
                           "out-of-bound-skips": skipped})


def _judgment_ftv(j: Judgment):
    out = set()
    for _, ty in j.gamma:
        out |= free_type_vars(ty)
    if j.delta is not None:
        out |= free_type_vars(j.delta[1])
    out |= free_type_vars_term(j.subject)
    if j.ascription is not None:
        out |= free_type_vars(j.ascription)
    return out


# ---------------------------------------------------------------------------
# parametric element counts


def verify_parametric_counts(model: ip.Model, plain_model: Optional[ip.Model] = None) -> VerificationReport:
    """Cardinalities of the basic polymorphic operation types, with the
    naive product-filter oracle cross-checked where it is feasible."""
    t0 = time.perf_counter()
    if not model._free_units:
        return _out_of_bound("parametric-counts", model, t0, "free algebras must be registered")
    failures = []
    expected = {0: 1, 1: 2, 2: 3} if model.monad.key == "exception" else None
    counts = {}
    for n in (0, 1, 2):
        poly = model.interp_vtype(ip.TypeEnv(), nary_op_type(n))
        counts[f"n={n}"] = poly.size
        tn = model.monad.apply(fm.FinSet(n)).size
        if poly.size != tn:
            failures.append({"n": n, "families": poly.size, "T(n)": tn})
        if expected and poly.size != expected[n]:
            failures.append({"n": n, "families": poly.size, "expected": expected[n]})
    oracle = plain_model or model
    for n in (0, 1, 2):
        ty = nary_op_type(n)
        try:
            naive = oracle.enumerate_families_naive(ip.TypeEnv(), ty)
        except ip.OutOfBoundError:
            continue
        poly = oracle.interp_vtype(ip.TypeEnv(), ty)
        if naive != poly.fams:
            failures.append({"n": n, "detail": "oracle disagreement",
                             "naive": len(naive), "propagated": poly.size})
    return _report("parametric-counts", model, t0, failures, counts=counts)


# ---------------------------------------------------------------------------
# typing conformance corpus


def _j(gamma=(), delta=None, subject=None, ascription=None) -> Judgment:
    return Judgment(tuple(gamma), delta, subject, ascription)


def typing_corpus():
    """Hand-derived positive and negative judgments.

    Returns (positives, negatives): positives pair a judgment with its
    expected type; negatives pair a judgment builder with the expected
    rejection code.
    """
    A, B, C = VVar("A"), VVar("B"), VVar("C")
    cA, cB, cC = CVar("A"), CVar("B"), CVar("C")
    bang = enc.encode_bang
    unit = enc.encode_value_type("Unit")
    two = enc.encode_num(2)
    consts = enc.constants_table(
        enc.register_effect_constants("exception", ("e",))
        + enc.register_effect_constants("powerset")
    )

    positives = []

    def pos(j, expected):
        positives.append((j, expected))

    # the stoup axiom and the structural core
    pos(_j((), ("x", cA), Var("x")), cA)
    pos(_j((), None, parse_term("fun x:B => x")), parse_type("B -> B"))
    pos(_j((), None, parse_term("fun x:B => fun y:C => x")), parse_type("B -> C -> B"))
    pos(_j((), None, parse_term("Fun X => fun x:X => x")), parse_type("forall X. X -> X"))
    pos(_j((), None, parse_term("Fun ^X => fun x:^X => x")), parse_type("forall ^X. ^X -> ^X"))
    pos(_j((), None, parse_term("lfun x:^A => x")), parse_type("^A -o ^A"))
    pos(_j((("t", B),), None, parse_term("Fun ^X => fun p:B -> ^X => p t")), bang(B))
    pos(_j((("h", Lolli(cA, cB)),), ("x", cA), parse_term("h x")), cB)
    pos(_j((("t", B),), ("x", cA), App(Lam("y", B, Var("x")), Var("t"))), cA)
    pos(_j((), ("x", cA), TyLamC("Y", Var("x"))), ForallC("Y", cA))
    pos(_j((), ("x", cA), TyLamV("Y", Var("x"))), ForallV("Y", cA))
    pos(_j((), ("x", cA), App(LinLam("y", cA, Var("y")), Var("x"))), cA)
    pos(_j((("x", B), ("y", C)), None, Var("x")), B)  # weakening
    pos(_j((), None, parse_term("fun x:B => fun x:C => x")), parse_type("B -> C -> C"))
    pos(
        _j((), None, App(TyAppV(parse_term("Fun X => fun x:X => x"), Arrow(B, B)),
                         parse_term("fun y:B => y"))),
        Arrow(B, B),
    )

    # eta-expansions at every definable type
    encoded = [
        unit,
        enc.encode_value_type("Prod", (A, B)),
        enc.encode_value_type("Zero"),
        enc.encode_value_type("Sum", (A, B)),
        enc.encode_value_type("ExistsV", ("X", Arrow(VVar("X"), B))),
        enc.encode_value_type("Mu", ("X", Arrow(B, VVar("X")))),
        enc.encode_value_type("Nu", ("X", Arrow(B, VVar("X")))),
        enc.encode_value_type("ExistsC", ("X", Arrow(CVar("X"), B))),
        enc.encode_comp_type("UnitC"),
        enc.encode_comp_type("ProdC", (cA, cB)),
        enc.encode_comp_type("ZeroC"),
        enc.encode_comp_type("Oplus", (cA, cB)),
        enc.encode_comp_type("Copower", (B, cA)),
        enc.encode_comp_type("ExistsVC", ("X", Arrow(VVar("X"), cB))),
        enc.encode_comp_type("ExistsCC", ("X", Arrow(B, CVar("X")))),
        enc.encode_comp_type("MuC", ("X", Arrow(B, CVar("X")))),
        enc.encode_comp_type("NuC", ("X", Arrow(B, CVar("X")))),
        bang(B),
    ]
    for ty in encoded:
        pos(_j((), None, Lam("z", ty, Var("z"))), Arrow(ty, ty))

    # definable intro/elim terms
    pos(_j((("a", A), ("b", B)), None, enc.pair_term(A, B, Var("a"), Var("b"))),
        enc.encode_value_type("Prod", (A, B)))
    pos(_j((("a", A),), None, enc.inl_term(A, B, Var("a"))),
        enc.encode_value_type("Sum", (A, B)))
    pos(_j((("b", B),), None, enc.inr_term(A, B, Var("b"))),
        enc.encode_value_type("Sum", (A, B)))
    sum_ab = enc.encode_value_type("Sum", (A, B))
    pos(
        _j(
            (("s", sum_ab), ("f", Arrow(A, C)), ("g", Arrow(B, C))),
            None,
            enc.case_term(Var("s"), C, Var("f"), Var("g")),
        ),
        C,
    )
    pos(
        _j(
            (("s", sum_ab), ("f", Arrow(A, cC)), ("g", Arrow(B, cC))),
            None,
            enc.case_term(Var("s"), cC, Var("f"), Var("g")),
        ),
        cC,
    )
    pos(_j((), ("a", cA), enc.oplus_inl(cA, cB, Var("a"))),
        enc.encode_comp_type("Oplus", (cA, cB)))
    oplus_ab = enc.encode_comp_type("Oplus", (cA, cB))
    pos(
        _j(
            (("f", Lolli(cA, cC)), ("g", Lolli(cB, cC))),
            ("s", oplus_ab),
            enc.oplus_case(Var("s"), cC, Var("f"), Var("g")),
        ),
        cC,
    )
    lhs = enc.elaborate_term(
        parse_term("let x <= z in p x"),
        gamma=(("p", Arrow(A, cB)),),
        delta=("z", bang(A)),
    )
    pos(_j((("p", Arrow(A, cB)),), ("z", bang(A)), lhs), cB)
    fwd, bwd = enc.girard_iso_terms(A, cB)
    pos(_j((), None, fwd), Arrow(Arrow(A, cB), Lolli(bang(A), cB)))
    pos(_j((), None, bwd), Arrow(Lolli(bang(A), cB), Arrow(A, cB)))
    cfwd, cbwd = enc.comp_iso_terms(cA)
    wrapped = ForallC("X", Arrow(Lolli(cA, CVar("X")), CVar("X")))
    pos(_j((), None, cfwd), Lolli(cA, wrapped))
    pos(_j((), None, cbwd), Lolli(wrapped, cA))

    # the effect constants at their published signatures
    pos(_j((), None, Var("or")), ForallC("X", Arrow(CVar("X"), Arrow(CVar("X"), CVar("X")))))
    pos(_j((), None, Var("raise^e")), ForallC("X", CVar("X")))
    pos(_j((), None, Var("handle^e")),
        ForallV("X", Lolli(Arrow(two, bang(VVar("X"))), bang(VVar("X")))))
    pos(_j((("u", Arrow(two, bang(A))),), None,
           App(TyAppV(Var("handle^e"), A), Var("u"))), bang(A))
    pos(_j((("y", cA),), None, App(App(TyAppC(Var("or"), cA), Var("y")), Var("y"))), cA)

    negatives = [
        (_j((), None, Var("nope")), tc.ErrorCode.UNBOUND_VAR),
        (_j((("t", cA),), ("x", cA), Var("t")), tc.ErrorCode.STOUP_VIOLATION),
        (
            _j((("h", Lolli(cA, Lolli(cA, cB))),), ("x", cA),
               App(App(Var("h"), Var("x")), Var("x"))),
            tc.ErrorCode.STOUP_VIOLATION,
        ),
        (_j((), ("x", cA), LinLam("y", cA, Var("y"))), tc.ErrorCode.STOUP_VIOLATION),
        (_j((), None, LinLam("y", B, Var("y"))), tc.ErrorCode.NON_COMPUTATION_STOUP),
        (_j((), None, Lam("f", Lolli(B, cC), Var("f"))), tc.ErrorCode.KIND_MISMATCH),
        (_j((("x", VVar("X")),), None, TyLamV("X", Var("x"))), tc.ErrorCode.ESCAPING_TYVAR),
        (_j((), ("x", CVar("X")), TyLamC("X", Var("x"))), tc.ErrorCode.ESCAPING_TYVAR),
        (
            _j((("f", Arrow(B, B)), ("y", C)), None, App(Var("f"), Var("y"))),
            tc.ErrorCode.APP_MISMATCH,
        ),
        (_j((("x", B),), None, App(Var("x"), Var("x"))), tc.ErrorCode.APP_MISMATCH),
        (_j((("x", B),), None, TyAppV(Var("x"), C)), tc.ErrorCode.APP_MISMATCH),
        (_j((("f", ForallV("X", VVar("X"))),), None, TyAppC(Var("f"), B)),
         tc.ErrorCode.KIND_MISMATCH),
        (_j((("f", ForallV("X", VVar("X"))),), None, TyAppV(Var("f"), cB)),
         tc.ErrorCode.KIND_MISMATCH),
        (_j((("f", ForallC("X", CVar("X"))),), None, TyAppV(Var("f"), B)),
         tc.ErrorCode.APP_MISMATCH),
        (
            _j((("g", Arrow(cA, cB)),), ("x", cA), App(Var("g"), Var("x"))),
            tc.ErrorCode.STOUP_VIOLATION,
        ),
        (_j((), ("x", B), Var("x")), tc.ErrorCode.NON_COMPUTATION_STOUP),
        (_j((("x", B),), ("x", cA), Var("x")), tc.ErrorCode.STOUP_VIOLATION),
        (
            _j((("s", oplus_ab), ("f", Lolli(cA, cC)), ("g", Lolli(cB, cC))), None,
               App(App(TyAppV(Var("s"), B), Var("f")), Var("g"))),
            tc.ErrorCode.KIND_MISMATCH if False else tc.ErrorCode.APP_MISMATCH,
        ),
    ]
    return positives, negatives, consts


def verify_typing_corpus() -> VerificationReport:
    """Checker agreement with all hand-derived judgments."""
    t0 = time.perf_counter()
    positives, negatives, consts = typing_corpus()
    failures = []
    for i, (j, expected) in enumerate(positives):
        try:
            ty = tc.typecheck(j, consts)
        except tc.TypingError as exc:
            failures.append({"case": f"pos-{i}", "detail": f"rejected: {exc}"})
            continue
        if expected is not None and not alpha_eq(ty, expected):
            failures.append({
                "case": f"pos-{i}",
                "got": print_type(ty),
                "want": print_type(expected),
            })
    for i, (j, code) in enumerate(negatives):
        try:
            ty = tc.typecheck(j, consts)
            failures.append({"case": f"neg-{i}", "detail": f"accepted at {print_type(ty)}"})
        except tc.TypingError as exc:
            if exc.code is not code:
                failures.append({
                    "case": f"neg-{i}", "got": exc.code.value, "want": code.value,
                })
    rep = VerificationReport(
        "typing-conformance",
        {"positives": len(positives), "negatives": len(negatives)},
        0,
        counts={"positives": len(positives), "negatives": len(negatives)},
        runtime_ms=(time.perf_counter() - t0) * 1000,
    )
    if failures:
        rep.status = "counterexample"
        rep.witness = failures[0]
    return rep


def verify_metatheory(seed: int = 2024, n_unicity: int = 200, n_subst: int = 100) -> VerificationReport:
    """Type unicity and both substitution properties on seeded terms."""
    t0 = time.perf_counter()
    failures = []
    gen = TermGenerator(seed)
    corpus = [gen.random_judgment() for _ in range(n_unicity)]
    rep_u = tc.check_unicity(corpus)
    for f in rep_u.failures:
        failures.append({"law": "unicity", "detail": f})
    # weakening: an unused binding never changes the type
    for j in corpus[:50]:
        widened = Judgment(
            (("fresh_unused", VVar("X")),) + j.gamma, j.delta, j.subject, None
        )
        try:
            ty = tc.typecheck(widened)
        except tc.TypingError as exc:
            failures.append({"law": "weakening", "detail": str(exc)})
            continue
        if not alpha_eq(ty, j.ascription):
            failures.append({"law": "weakening", "detail": "type changed"})
    samples = [gen.random_subst_sample(1) for _ in range(n_subst // 2)]
    samples += [gen.random_subst_sample(2) for _ in range(n_subst - n_subst // 2)]
    rep_s = tc.check_substitution_lemma(samples)
    for f in rep_s.failures:
        failures.append({"law": "substitution", "detail": f})
    rep = VerificationReport(
        "metatheory", {"seed": seed}, 0,
        counts={"unicity-terms": rep_u.total, "substitution-samples": rep_s.total},
        runtime_ms=(time.perf_counter() - t0) * 1000,
    )
    if failures:
        rep.status = "counterexample"
        rep.witness = failures[0]
    return rep


def verify_cbpv() -> VerificationReport:
    """The type-level translation of the call-by-push-value constructors."""
    t0 = time.perf_counter()
    E = enc
    unit = E.CbpvUnit()
    corpus = [
        (E.CbpvF(unit), E.encode_bang(E.encode_value_type("Unit"))),
        (E.CbpvU(E.CbpvF(E.CbpvUnit())), E.encode_bang(E.encode_value_type("Unit"))),
        (E.CbpvProd(unit, unit),
         E.encode_value_type("Prod", (E.encode_value_type("Unit"),) * 2)),
        (E.CbpvSum(unit, E.CbpvZero()),
         E.encode_value_type("Sum", (E.encode_value_type("Unit"), E.encode_value_type("Zero")))),
        (E.CbpvZero(), E.encode_value_type("Zero")),
        (E.CbpvFun(unit, E.CbpvF(unit)),
         Arrow(E.encode_value_type("Unit"), E.encode_bang(E.encode_value_type("Unit")))),
        (E.CbpvProdC(E.CbpvF(unit), E.CbpvF(E.CbpvZero())),
         E.encode_comp_type("ProdC", (E.encode_bang(E.encode_value_type("Unit")),
                                      E.encode_bang(E.encode_value_type("Zero"))))),
        (E.CbpvU(E.CbpvProdC(E.CbpvF(unit), E.CbpvF(unit))),
         E.encode_comp_type("ProdC", (E.encode_bang(E.encode_value_type("Unit")),) * 2)),
        (E.CbpvFun(E.CbpvSum(unit, unit), E.CbpvF(E.CbpvProd(unit, unit))),
         Arrow(E.encode_num(2),
               E.encode_bang(E.encode_value_type("Prod", (E.encode_value_type("Unit"),) * 2)))),
        (E.CbpvF(E.CbpvU(E.CbpvF(unit))),
         E.encode_bang(E.encode_bang(E.encode_value_type("Unit")))),
    ]
    failures = []
    for i, (src, want) in enumerate(corpus):
        got = E.cbpv_translate_type(src)
        if not alpha_eq(got, want):
            failures.append({"case": i, "got": print_type(got), "want": print_type(want)})
            continue
        classify_type(got)  # the output must be a well-formed type
        if isinstance(src, (E.CbpvF, E.CbpvProdC)) and classify_type(got).value != "computation":
            failures.append({"case": i, "detail": "expected a computation type"})
    rep = VerificationReport(
        "cbpv-translation", {"corpus": len(corpus)}, 0,
        counts={"types": len(corpus)}, runtime_ms=(time.perf_counter() - t0) * 1000,
    )
    if failures:
        rep.status = "counterexample"
        rep.witness = failures[0]
    return rep
