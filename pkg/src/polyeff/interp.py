"""Denotational and relational interpretation over a finite model.

Every type denotes a finite enumerated domain (a ``SemSet``); a
semantic value is an index into its domain, so extensional equality is
integer equality.  Function domains index tables mixed-radix, ``-o``
domains index the lexicographically ordered list of structure-
preserving tables, and polymorphic domains index the list of
*parametric families*: tuples with one component per registered object
that preserve every admissible relation between every pair of objects.

Quantifiers range over the model's registered objects only (all sets
and all algebra structures up to the bound, plus free algebras when
registered).  Projection at other objects goes through a transport
isomorphism when an isomorphic representative exists, and raises
``OutOfBoundError`` otherwise.  All enumerations are deterministic, so
interpretation is reproducible bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Callable, Optional, Sequence

from . import encodings
from . import finmodel as fm
from . import typecheck as tc
from .kernel import (
    App,
    Arrow,
    Const,
    CVar,
    ForallC,
    ForallV,
    Judgment,
    Kind,
    Lam,
    LinLam,
    Lolli,
    TermExpr,
    TyAppC,
    TyAppV,
    TyLamC,
    TyLamV,
    TypeExpr,
    VVar,
    Var,
    classify_type,
    free_term_vars,
    free_type_vars,
    fresh_name,
    subst_term,
)

NAIVE_FAMILY_CAP = 1_000_000
ITER_CAP = 400_000


class OutOfBoundError(Exception):
    """The requested object has no isomorphic representative in the model."""


class InterpError(Exception):
    pass


# ---------------------------------------------------------------------------
# semantic domains


@dataclass(eq=False)
class SemSet:
    size: int


@dataclass(eq=False)
class AtomSem(SemSet):
    pass


@dataclass(eq=False)
class FunSem(SemSet):
    dom: SemSet
    cod: SemSet

    def __post_init__(self):
        self._pows: Optional[list[int]] = None

    def apply(self, f: int, x: int) -> int:
        if self._pows is None:
            self._pows = [self.cod.size**i for i in range(self.dom.size + 1)]
        return (f // self._pows[x]) % self.cod.size

    def encode(self, table: Sequence[int]) -> int:
        acc = 0
        for x in reversed(range(self.dom.size)):
            acc = acc * self.cod.size + table[x]
        return acc

    def table(self, f: int) -> tuple[int, ...]:
        return tuple(self.apply(f, x) for x in range(self.dom.size))


def fun_sem(dom: SemSet, cod: SemSet) -> FunSem:
    return FunSem(cod.size**dom.size, dom, cod)


@dataclass(eq=False)
class HomSem(SemSet):
    dom: SemSet
    cod: SemSet
    tables: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        self._index: Optional[dict] = None

    def apply(self, f: int, x: int) -> int:
        return self.tables[f][x]

    def encode(self, table: Sequence[int]) -> int:
        if self._index is None:
            self._index = {t: i for i, t in enumerate(self.tables)}
        idx = self._index.get(tuple(table))
        if idx is None:
            raise InterpError("table is not structure-preserving")
        return idx

    def table(self, f: int) -> tuple[int, ...]:
        return self.tables[f]


@dataclass(eq=False)
class PolySem(SemSet):
    csort: bool  # quantification over algebras rather than sets
    comps: tuple[SemSet, ...]
    fams: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        self._index: Optional[dict] = None

    def component(self, f: int, obj: int) -> int:
        return self.fams[f][obj]

    def encode(self, fam: Sequence[int]) -> int:
        if self._index is None:
            self._index = {t: i for i, t in enumerate(self.fams)}
        idx = self._index.get(tuple(fam))
        if idx is None:
            raise InterpError("family is not parametric")
        return idx


def apply_sem(sem: SemSet, f: int, x: int) -> int:
    return sem.apply(f, x)  # type: ignore[attr-defined]


# ---------------------------------------------------------------------------
# environments


VSORT, CSORT = "v", "c"


@dataclass(frozen=True)
class TypeEnv:
    """Immutable map from sorted type variables to sets / algebras."""

    items: tuple = ()

    def get(self, sort: str, name: str):
        for (s, n), v in self.items:
            if s == sort and n == name:
                return v
        raise InterpError(f"type variable {'^' if sort == CSORT else ''}{name} not in environment")

    def set(self, sort: str, name: str, value) -> "TypeEnv":
        rest = tuple(it for it in self.items if it[0] != (sort, name))
        return TypeEnv(tuple(sorted(rest + (((sort, name), value),))))


def type_env(vvars: dict = {}, cvars: dict = {}) -> TypeEnv:
    items = tuple(((VSORT, n), v) for n, v in vvars.items()) + tuple(
        ((CSORT, n), v) for n, v in cvars.items()
    )
    return TypeEnv(tuple(sorted(items, key=lambda it: it[0])))


@dataclass(frozen=True)
class RelEnv:
    rho1: TypeEnv
    rho2: TypeEnv
    rels: tuple = ()  # ((sort, name), frozenset of pairs), sorted

    def rel(self, sort: str, name: str) -> frozenset:
        for (s, n), r in self.rels:
            if s == sort and n == name:
                return r
        raise InterpError(f"no relation for {'^' if sort == CSORT else ''}{name}")

    def set(self, sort: str, name: str, left, right, rel: frozenset) -> "RelEnv":
        nl = left.size if isinstance(left, fm.FinSet) else left.carrier.size
        nr = right.size if isinstance(right, fm.FinSet) else right.carrier.size
        if any(not (0 <= x < nl and 0 <= y < nr) for x, y in rel):
            raise InterpError(f"relation escapes its carriers {nl}x{nr}")
        rest = tuple(it for it in self.rels if it[0] != (sort, name))
        return RelEnv(
            self.rho1.set(sort, name, left),
            self.rho2.set(sort, name, right),
            tuple(sorted(rest + (((sort, name), rel),))),
        )


def _diag_of(value) -> frozenset:
    n = value.size if isinstance(value, fm.FinSet) else value.carrier.size
    return frozenset((i, i) for i in range(n))


def diag_relenv(env: TypeEnv) -> RelEnv:
    rels = tuple(sorted((key, _diag_of(v)) for key, v in env.items))
    return RelEnv(env, env, rels)


@dataclass
class Env:
    """Interpretation environment: objects for type variables, indices for term variables."""

    types: TypeEnv
    terms: dict

    def __init__(self, vvars: dict = {}, cvars: dict = {}, terms: dict = {}):
        self.types = type_env(vvars, cvars)
        self.terms = dict(terms)


# ---------------------------------------------------------------------------
# relation views


class RelView:
    left: SemSet
    right: SemSet

    def contains(self, a: int, b: int) -> bool:
        raise NotImplementedError

    def pairs(self) -> frozenset:
        raise NotImplementedError


class AtomRel(RelView):
    def __init__(self, left: SemSet, right: SemSet, pairs: frozenset):
        self.left, self.right = left, right
        self._pairs = pairs

    def contains(self, a: int, b: int) -> bool:
        return (a, b) in self._pairs

    def pairs(self) -> frozenset:
        return self._pairs


class FunRel(RelView):
    """Related functions map related arguments to related results."""

    def __init__(self, left: SemSet, right: SemSet, dom_rel: RelView, cod_rel: RelView):
        self.left, self.right = left, right
        self.dom_rel, self.cod_rel = dom_rel, cod_rel
        self._dom_pairs: Optional[tuple] = None
        self._pairs: Optional[frozenset] = None

    def contains(self, f: int, g: int) -> bool:
        if self._dom_pairs is None:
            self._dom_pairs = tuple(sorted(self.dom_rel.pairs()))
        cod = self.cod_rel
        l, r = self.left, self.right
        for x, y in self._dom_pairs:
            if not cod.contains(l.apply(f, x), r.apply(g, y)):  # type: ignore[attr-defined]
                return False
        return True

    def pairs(self) -> frozenset:
        if self._pairs is None:
            if self.left.size * self.right.size > ITER_CAP:
                raise OutOfBoundError(
                    f"relation too large to materialize: {self.left.size}x{self.right.size}"
                )
            self._pairs = frozenset(
                (f, g)
                for f in range(self.left.size)
                for g in range(self.right.size)
                if self.contains(f, g)
            )
        return self._pairs


class ForallRel(RelView):
    """Related families have related components at every pair of objects
    under every admissible relation."""

    def __init__(self, model: "Model", rho: RelEnv, sort: str, binder: str, body: TypeExpr,
                 left: SemSet, right: SemSet):
        self.model, self.rho, self.sort, self.binder, self.body = model, rho, sort, binder, body
        self.left, self.right = left, right
        self._memo: dict = {}
        self._pairs: Optional[frozenset] = None

    def contains(self, a: int, b: int) -> bool:
        hit = self._memo.get((a, b))
        if hit is not None:
            return hit
        model, sort = self.model, self.sort
        objs = model.objects(sort)
        fam_a = self.left.fams[a]  # type: ignore[attr-defined]
        fam_b = self.right.fams[b]  # type: ignore[attr-defined]
        ok = True
        for i in range(len(objs)):
            for j in range(len(objs)):
                for q in model.rels_for_pair(sort, i, j):
                    rho2 = self.rho.set(sort, self.binder, objs[i], objs[j], q)
                    view = model.interp_rel(rho2, self.body)
                    if not view.contains(fam_a[i], fam_b[j]):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        self._memo[(a, b)] = ok
        return ok

    def pairs(self) -> frozenset:
        if self._pairs is None:
            self._pairs = frozenset(
                (a, b)
                for a in range(self.left.size)
                for b in range(self.right.size)
                if self.contains(a, b)
            )
        return self._pairs


# ---------------------------------------------------------------------------
# the model


class Model:
    """A finite interpretation context: monad, bound, registered objects, caches."""

    def __init__(
        self,
        monad: fm.MonadSpec,
        bound: int,
        include_free_algebras: bool = False,
        constants: Sequence = (),
    ):
        self.monad = monad
        self.bound = bound
        self.sets = fm.enumerate_sets(fm.Bound(bound))
        self.algebras = list(fm.enumerate_algebras(monad, fm.Bound(bound)))
        self._free_units: dict[int, tuple[int, ...]] = {}  # algebra index -> unit table
        self._free_of_size: dict[int, int] = {}  # |A| -> algebra index of T A
        self.constants: dict[str, tuple[TypeExpr, str]] = {
            sig.name: (sig.scheme, sig.denotation_key) for sig in constants
        }
        self._vty: dict = {}
        self._cty: dict = {}
        self._rel: dict = {}
        self._set_rels: dict = {}
        self._alg_rels: dict = {}
        self._const_val: dict = {}
        self._two: Optional[tuple[int, int]] = None
        if include_free_algebras:
            for s in self.sets:
                self.register_free_algebra(s)

    # -- objects ---------------------------------------------------------

    @property
    def constant_schemes(self) -> dict[str, TypeExpr]:
        return {name: scheme for name, (scheme, _) in self.constants.items()}

    def register_free_algebra(self, a: fm.FinSet) -> int:
        """Append the algebra on T A (deduplicated); returns its object index."""
        plain = fm.FinSet(a.size)
        alg, eta = fm.free_algebra(self.monad, plain)
        alg = fm.Alg(
            self.monad,
            fm.FinSet(alg.carrier.size),
            raise_points=alg.raise_points,
            or_table=alg.or_table,
        )
        idx = self.alg_index(alg)
        if idx is None:
            if self._vty or self._cty or self._rel:
                raise InterpError("cannot extend the algebra list after interpretation began")
            self.algebras.append(alg)
            idx = len(self.algebras) - 1
        self._free_units[idx] = eta
        self._free_of_size[a.size] = idx
        return idx

    def free_algebra_index(self, size: int) -> int:
        idx = self._free_of_size.get(size)
        if idx is None:
            raise OutOfBoundError(
                f"free algebra on a {size}-element set is not registered in this model"
            )
        return idx

    def alg_index(self, alg: fm.Alg) -> Optional[int]:
        for i, a in enumerate(self.algebras):
            if a == alg:
                return i
        return None

    def objects(self, sort: str):
        return self.sets if sort == VSORT else self.algebras

    def rels_for_pair(self, sort: str, i: int, j: int) -> list[frozenset]:
        """Admissible relations between objects i and j, most selective first."""
        key = (sort, i, j)
        cache = self._set_rels if sort == VSORT else self._alg_rels
        if key not in cache:
            if sort == VSORT:
                rels = fm.enumerate_set_rels(self.sets[i], self.sets[j])
            else:
                rels = fm.enumerate_alg_rels(self.algebras[i], self.algebras[j])
            cache[key] = sorted(rels, key=lambda r: (len(r), sorted(r)))
        return cache[key]

    # -- value-type interpretation ----------------------------------------

    def _restrict(self, env: TypeEnv, ty: TypeExpr):
        fvs = free_type_vars(ty)
        keys = {(VSORT if isinstance(v, VVar) else CSORT, v.name) for v in fvs}
        return tuple(it for it in env.items if it[0] in keys)

    def interp_vtype(self, env: TypeEnv, ty: TypeExpr) -> SemSet:
        key = (ty, self._restrict(env, ty))
        hit = self._vty.get(key)
        if hit is not None:
            return hit
        sem = self._interp_vtype(env, ty)
        self._vty[key] = sem
        return sem

    def _interp_vtype(self, env: TypeEnv, ty: TypeExpr) -> SemSet:
        if isinstance(ty, VVar):
            return AtomSem(env.get(VSORT, ty.name).size)
        if isinstance(ty, CVar):
            return AtomSem(env.get(CSORT, ty.name).carrier.size)
        if isinstance(ty, Arrow):
            return fun_sem(self.interp_vtype(env, ty.dom), self.interp_vtype(env, ty.cod))
        if isinstance(ty, Lolli):
            dom_alg = self.interp_ctype(env, ty.dom)
            cod_alg = self.interp_ctype(env, ty.cod)
            dom_sem = self.interp_vtype(env, ty.dom)
            cod_sem = self.interp_vtype(env, ty.cod)
            tables = self._hom_tables(dom_alg, cod_alg)
            return HomSem(len(tables), dom_sem, cod_sem, tables)
        if isinstance(ty, (ForallV, ForallC)):
            sort = VSORT if isinstance(ty, ForallV) else CSORT
            objs = self.objects(sort)
            comps = []
            for obj in objs:
                comps.append(self.interp_vtype(env.set(sort, ty.binder, obj), ty.body))
            fams = self._families(env, sort, ty.binder, ty.body, comps)
            return PolySem(len(fams), sort == CSORT, tuple(comps), fams)
        raise InterpError(f"cannot interpret type {ty!r}")

    def _hom_tables(self, dom: fm.Alg, cod: fm.Alg) -> tuple[tuple[int, ...], ...]:
        n, m = dom.carrier.size, cod.carrier.size
        if m == 0:
            return ((),) if n == 0 else ()
        # pin exception points first; enumerate only the free positions
        forced: dict[int, int] = {}
        if self.monad.key == "exception":
            for p, q in zip(dom.raise_points, cod.raise_points):
                if forced.setdefault(p, q) != q:
                    return ()
        free_pos = [i for i in range(n) if i not in forced]
        if m ** len(free_pos) > ITER_CAP:
            raise OutOfBoundError(f"hom space too large: {m}^{len(free_pos)}")
        out = []
        for choice in product(range(m), repeat=len(free_pos)):
            table = [0] * n
            for p, q in forced.items():
                table[p] = q
            for p, v in zip(free_pos, choice):
                table[p] = v
            if fm.is_homomorphism(table, dom, cod):
                out.append(tuple(table))
        return tuple(sorted(out))

    # -- computation-type interpretation -----------------------------------

    def interp_ctype(self, env: TypeEnv, ty: TypeExpr) -> fm.Alg:
        key = (ty, self._restrict(env, ty))
        hit = self._cty.get(key)
        if hit is not None:
            return hit
        alg = self._interp_ctype(env, ty)
        sem = self.interp_vtype(env, ty)
        assert alg.carrier.size == sem.size, "algebra carrier must match the set interpretation"
        self._cty[key] = alg
        return alg

    def _interp_ctype(self, env: TypeEnv, ty: TypeExpr) -> fm.Alg:
        if classify_type(ty) is not Kind.COMPUTATION:
            raise InterpError(f"{ty} is not a computation type")
        m = self.monad
        if isinstance(ty, CVar):
            return env.get(CSORT, ty.name)
        # the operation tables are built per element through the structural
        # recursion below, so component algebras never materialize in full
        n = self.interp_vtype(env, ty).size
        if m.key == "identity":
            return fm.Alg(m, fm.FinSet(n))
        if m.key == "exception":
            pts = tuple(self._point_at(env, ty, e) for e in range(m.n_exc))
            return fm.Alg(m, fm.FinSet(n), raise_points=pts)
        if n > 512:
            raise OutOfBoundError(f"structure table too large: {n}")
        table = tuple(
            tuple(self._join_at(env, ty, f, g) for g in range(n)) for f in range(n)
        )
        return fm.Alg(m, fm.FinSet(n), or_table=table)

    def _point_at(self, env: TypeEnv, ty: TypeExpr, e: int) -> int:
        """The e-th distinguished element of a computation-type domain."""
        if isinstance(ty, CVar):
            return env.get(CSORT, ty.name).raise_points[e]
        sem = self.interp_vtype(env, ty)
        if isinstance(ty, Arrow):
            point = self._point_at(env, ty.cod, e)
            return sem.encode([point] * sem.dom.size)  # type: ignore[attr-defined]
        if isinstance(ty, (ForallV, ForallC)):
            sort = VSORT if isinstance(ty, ForallV) else CSORT
            fam = tuple(
                self._point_at(env.set(sort, ty.binder, obj), ty.body, e)
                for obj in self.objects(sort)
            )
            return sem.encode(fam)  # type: ignore[attr-defined]
        raise InterpError(f"no distinguished element at {ty!r}")

    def _join_at(self, env: TypeEnv, ty: TypeExpr, u: int, v: int) -> int:
        """The componentwise join of two elements of a computation-type domain."""
        if isinstance(ty, CVar):
            return env.get(CSORT, ty.name).op_or(u, v)
        sem = self.interp_vtype(env, ty)
        if isinstance(ty, Arrow):
            table = [
                self._join_at(env, ty.cod, sem.apply(u, x), sem.apply(v, x))
                for x in range(sem.dom.size)  # type: ignore[attr-defined]
            ]
            return sem.encode(table)  # type: ignore[attr-defined]
        if isinstance(ty, (ForallV, ForallC)):
            sort = VSORT if isinstance(ty, ForallV) else CSORT
            fam = tuple(
                self._join_at(env.set(sort, ty.binder, obj), ty.body, fu, fv)
                for obj, fu, fv in zip(self.objects(sort), sem.fams[u], sem.fams[v])  # type: ignore[attr-defined]
            )
            return sem.encode(fam)  # type: ignore[attr-defined]
        raise InterpError(f"no join at {ty!r}")

    # -- relational interpretation ----------------------------------------

    def _restrict_rel(self, rho: RelEnv, ty: TypeExpr):
        fvs = free_type_vars(ty)
        keys = {(VSORT if isinstance(v, VVar) else CSORT, v.name) for v in fvs}
        return (
            tuple(it for it in rho.rho1.items if it[0] in keys),
            tuple(it for it in rho.rho2.items if it[0] in keys),
            tuple(it for it in rho.rels if it[0] in keys),
        )

    def interp_rel(self, rho: RelEnv, ty: TypeExpr) -> RelView:
        key = (ty, self._restrict_rel(rho, ty))
        hit = self._rel.get(key)
        if hit is not None:
            return hit
        view = self._interp_rel(rho, ty)
        self._rel[key] = view
        return view

    def _interp_rel(self, rho: RelEnv, ty: TypeExpr) -> RelView:
        left = self.interp_vtype(rho.rho1, ty)
        right = self.interp_vtype(rho.rho2, ty)
        if isinstance(ty, VVar):
            return AtomRel(left, right, rho.rel(VSORT, ty.name))
        if isinstance(ty, CVar):
            return AtomRel(left, right, rho.rel(CSORT, ty.name))
        if isinstance(ty, (Arrow, Lolli)):
            dom_rel = self.interp_rel(rho, ty.dom)
            cod_rel = self.interp_rel(rho, ty.cod)
            return FunRel(left, right, dom_rel, cod_rel)
        if isinstance(ty, (ForallV, ForallC)):
            sort = VSORT if isinstance(ty, ForallV) else CSORT
            return ForallRel(self, rho, sort, ty.binder, ty.body, left, right)
        raise InterpError(f"cannot interpret type {ty!r}")

    def interp_rel_pairs(self, rho: RelEnv, ty: TypeExpr) -> fm.Rel:
        """Materialized relation, as an explicit pair set."""
        view = self.interp_rel(rho, ty)
        return fm.Rel(fm.FinSet(view.left.size), fm.FinSet(view.right.size), view.pairs())

    # -- parametric families ------------------------------------------------

    def _family_rel(self, env: TypeEnv, sort: str, binder: str, body: TypeExpr,
                    i: int, j: int, q: frozenset) -> RelView:
        objs = self.objects(sort)
        rho = diag_relenv(env).set(sort, binder, objs[i], objs[j], q)
        return self.interp_rel(rho, body)

    def _families(self, env: TypeEnv, sort: str, binder: str, body: TypeExpr,
                  comps: Sequence[SemSet]) -> tuple[tuple[int, ...], ...]:
        """All component tuples that preserve every admissible relation.

        Objects are processed in ascending component order; candidates are
        pruned by self-relations first and against previously fixed
        components immediately after.
        """
        k = len(comps)
        if k == 0:
            return ((),)
        order = sorted(range(k), key=lambda i: (comps[i].size, i))
        partial: list[tuple[int, ...]] = [()]
        for pos, oi in enumerate(order):
            if comps[oi].size > ITER_CAP:
                raise OutOfBoundError(
                    f"component space too large to enumerate: {comps[oi].size}"
                )
            cands = list(range(comps[oi].size))
            for q in self.rels_for_pair(sort, oi, oi):
                view = self._family_rel(env, sort, binder, body, oi, oi, q)
                cands = [c for c in cands if view.contains(c, c)]
                if not cands:
                    break
            if not cands:
                return ()
            grown: list[tuple[int, ...]] = []
            for asg in partial:
                for c in cands:
                    ok = True
                    for prev_pos in range(pos):
                        oj = order[prev_pos]
                        cp = asg[prev_pos]
                        for q in self.rels_for_pair(sort, oj, oi):
                            if not self._family_rel(env, sort, binder, body, oj, oi, q).contains(cp, c):
                                ok = False
                                break
                        if ok:
                            for q in self.rels_for_pair(sort, oi, oj):
                                if not self._family_rel(env, sort, binder, body, oi, oj, q).contains(c, cp):
                                    ok = False
                                    break
                        if not ok:
                            break
                    if ok:
                        grown.append(asg + (c,))
            partial = grown
            if not partial:
                return ()
        inv = [0] * k
        for pos, oi in enumerate(order):
            inv[oi] = pos
        return tuple(sorted(tuple(asg[inv[i]] for i in range(k)) for asg in partial))

    def enumerate_families_naive(self, env: TypeEnv, ty: TypeExpr) -> tuple[tuple[int, ...], ...]:
        """Oracle tier: filter the full component product by all constraints."""
        if not isinstance(ty, (ForallV, ForallC)):
            raise InterpError("naive family enumeration expects a quantified type")
        sort = VSORT if isinstance(ty, ForallV) else CSORT
        objs = self.objects(sort)
        comps = [self.interp_vtype(env.set(sort, ty.binder, o), ty.body) for o in objs]
        total = 1
        for c in comps:
            total *= c.size
        if total > NAIVE_FAMILY_CAP:
            raise OutOfBoundError(f"naive family space too large: {total}")
        out = []
        for fam in product(*(range(c.size) for c in comps)):
            ok = True
            for i in range(len(objs)):
                for j in range(len(objs)):
                    for q in self.rels_for_pair(sort, i, j):
                        view = self._family_rel(env, sort, ty.binder, ty.body, i, j, q)
                        if not view.contains(fam[i], fam[j]):
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                out.append(fam)
        return tuple(sorted(out))

    # -- transport ----------------------------------------------------------

    def transport(
        self,
        ty: TypeExpr,
        env_src: TypeEnv,
        env_dst: TypeEnv,
        iso: dict,
    ) -> Callable[[int], int]:
        """The canonical bijection [[ty]]src -> [[ty]]dst induced by an
        isomorphism of environments (one bijection table per type variable)."""
        src = self.interp_vtype(env_src, ty)
        dst = self.interp_vtype(env_dst, ty)
        if isinstance(ty, (VVar, CVar)):
            sort = VSORT if isinstance(ty, VVar) else CSORT
            table = iso.get((sort, ty.name))
            if table is None:
                return lambda x: x
            return lambda x: table[x]
        if isinstance(ty, (Arrow, Lolli)):
            inv = {key: _invert(tbl) for key, tbl in iso.items()}
            dom_back = self.transport(ty.dom, env_dst, env_src, inv)
            cod_fwd = self.transport(ty.cod, env_src, env_dst, iso)

            def go(f: int) -> int:
                table = [
                    cod_fwd(apply_sem(src, f, dom_back(y)))
                    for y in range(dst.dom.size)  # type: ignore[attr-defined]
                ]
                return dst.encode(table)  # type: ignore[attr-defined]

            return go
        if isinstance(ty, (ForallV, ForallC)):
            sort = VSORT if isinstance(ty, ForallV) else CSORT
            objs = self.objects(sort)
            movers = []
            for obj in objs:
                n = obj.size if sort == VSORT else obj.carrier.size
                iso2 = dict(iso)
                iso2[(sort, ty.binder)] = tuple(range(n))
                movers.append(
                    self.transport(
                        ty.body,
                        env_src.set(sort, ty.binder, obj),
                        env_dst.set(sort, ty.binder, obj),
                        iso2,
                    )
                )

            def gofam(f: int) -> int:
                fam = src.fams[f]  # type: ignore[attr-defined]
                moved = tuple(mv(c) for mv, c in zip(movers, fam))
                return dst.encode(moved)  # type: ignore[attr-defined]

            return gofam
        raise InterpError(f"cannot transport at {ty!r}")

    # -- projection -----------------------------------------------------------

    def _algebra_isos(self, source: fm.Alg, target: fm.Alg, limit: int = 2) -> list[tuple[int, ...]]:
        """Bijective homomorphisms source -> target, deterministic order."""
        n = source.carrier.size
        if target.carrier.size != n:
            return []
        out = []
        from itertools import permutations

        for perm in permutations(range(n)):
            if fm.is_homomorphism(perm, source, target) and fm.is_homomorphism(
                _invert(perm), target, source
            ):
                out.append(tuple(perm))
                if len(out) >= limit:
                    break
        return out

    def project_poly(
        self,
        poly: PolySem,
        fam_idx: int,
        target,
        binder: str,
        body: TypeExpr,
        env: TypeEnv,
    ) -> int:
        """Component of a polymorphic value at an arbitrary object.

        Stored components are looked up directly; other objects go through
        transport along an isomorphism to a registered representative, and
        the result is checked to be independent of the isomorphism chosen.
        """
        if not poly.csort:
            size = target.size if isinstance(target, fm.FinSet) else target
            if size >= len(self.sets):
                raise OutOfBoundError(f"no registered set of size {size}")
            return poly.fams[fam_idx][size]
        assert isinstance(target, fm.Alg)
        idx = self.alg_index(target)
        if idx is not None:
            return poly.fams[fam_idx][idx]
        results = []
        for k, cand in enumerate(self.algebras):
            if cand.carrier.size != target.carrier.size:
                continue
            for iso in self._algebra_isos(cand, target):
                mover = self.transport(
                    body,
                    env.set(CSORT, binder, cand),
                    env.set(CSORT, binder, target),
                    {(CSORT, binder): iso},
                )
                results.append(mover(poly.fams[fam_idx][k]))
                if len(results) >= 2:
                    break
            if results:
                break
        if not results:
            raise OutOfBoundError(
                f"no registered algebra isomorphic to carrier size {target.carrier.size}"
            )
        assert all(r == results[0] for r in results), "projection depends on the isomorphism"
        return results[0]


    # -- term interpretation ---------------------------------------------

    def _eval(self, t: TermExpr, gamma, delta, tyenv: TypeEnv, tmenv: dict) -> int:
        consts = self.constant_schemes
        if isinstance(t, Var):
            if t.name in tmenv:
                return tmenv[t.name]
            if t.name in self.constants:
                return self.constant_value(t.name)
            raise InterpError(f"no value for variable {t.name!r}")
        if isinstance(t, Const):
            return self.constant_value(t.name)
        if isinstance(t, Lam):
            var, body = t.var, t.body
            if delta is not None and var == delta[0]:
                new = fresh_name(var, free_term_vars(body) | {n for n, _ in gamma} | {delta[0]})
                body = subst_term(body, var, Var(new))
                var = new
            gamma2 = gamma + ((var, t.ann),)
            cod_ty = tc.synth(gamma2, delta, body, consts)
            sem = self.interp_vtype(tyenv, Arrow(t.ann, cod_ty))
            assert isinstance(sem, FunSem)
            table = []
            for d in range(sem.dom.size):
                tm2 = dict(tmenv)
                tm2[var] = d
                table.append(self._eval(body, gamma2, delta, tyenv, tm2))
            return sem.encode(table)
        if isinstance(t, LinLam):
            var, body = t.var, t.body
            if any(n == var for n, _ in gamma):
                new = fresh_name(var, free_term_vars(body) | {n for n, _ in gamma})
                body = subst_term(body, var, Var(new))
                var = new
            delta2 = (var, t.ann)
            cod_ty = tc.synth(gamma, delta2, body, consts)
            sem = self.interp_vtype(tyenv, Lolli(t.ann, cod_ty))
            assert isinstance(sem, HomSem)
            table = []
            for d in range(sem.dom.size):
                tm2 = dict(tmenv)
                tm2[var] = d
                table.append(self._eval(body, gamma, delta2, tyenv, tm2))
            # encoding fails loudly if the body is not a homomorphism in its stoup
            return sem.encode(table)
        if isinstance(t, App):
            side = tc.route_stoup(delta, t.fn, t.arg)
            dfn = delta if side == "fn" else None
            darg = delta if side == "arg" else None
            head_ty = tc.synth(gamma, dfn, t.fn, consts)
            sem = self.interp_vtype(tyenv, head_ty)
            fval = self._eval(t.fn, gamma, dfn, tyenv, tmenv)
            aval = self._eval(t.arg, gamma, darg, tyenv, tmenv)
            return apply_sem(sem, fval, aval)
        if isinstance(t, (TyLamV, TyLamC)):
            sort = VSORT if isinstance(t, TyLamV) else CSORT
            forall_ty = tc.synth(gamma, delta, t, consts)
            poly = self.interp_vtype(tyenv, forall_ty)
            assert isinstance(poly, PolySem)
            fam = []
            for obj in self.objects(sort):
                env2 = tyenv.set(sort, t.binder, obj)
                fam.append(self._eval(t.body, gamma, delta, env2, tmenv))
            # encoding fails loudly if the family is not parametric
            return poly.encode(tuple(fam))
        if isinstance(t, (TyAppV, TyAppC)):
            head_ty = tc.synth(gamma, delta, t.fn, consts)
            poly = self.interp_vtype(tyenv, head_ty)
            assert isinstance(poly, PolySem)
            pval = self._eval(t.fn, gamma, delta, tyenv, tmenv)
            if isinstance(head_ty, ForallV):
                target = fm.FinSet(self.interp_vtype(tyenv, t.arg).size)
                return self.project_poly(poly, pval, target, head_ty.binder, head_ty.body, tyenv)
            assert isinstance(head_ty, ForallC)
            target_alg = self.interp_ctype(tyenv, t.arg)
            return self.project_poly(poly, pval, target_alg, head_ty.binder, head_ty.body, tyenv)
        raise InterpError(f"cannot evaluate {t!r} (unelaborated sugar?)")

    def interp_term(self, j: Judgment, env: Env) -> int:
        """Evaluate a checked judgment under an environment covering its variables."""
        tc.typecheck(j, self.constant_schemes)
        tmenv = dict(env.terms)
        bindings = list(j.gamma) + ([j.delta] if j.delta is not None else [])
        missing = [n for n, _ in bindings if n not in tmenv]
        if missing:
            raise InterpError(f"environment misses values for {missing}")
        for name, ty in bindings:
            size = self.interp_vtype(env.types, ty).size
            if not 0 <= tmenv[name] < size:
                raise InterpError(
                    f"value {tmenv[name]} for {name!r} escapes its domain of size {size}"
                )
        return self._eval(j.subject, j.gamma, j.delta, env.types, tmenv)

    def two_values(self) -> tuple[int, int]:
        """Indices of the two inhabitants of [[1 + 1]] (left first)."""
        if self._two is None:
            vals = []
            for which in (0, 1):
                tm = encodings.two_value(which)
                vals.append(self._eval(tm, (), None, TypeEnv(), {}))
            assert vals[0] != vals[1], "the two boolean values must be distinct"
            self._two = (vals[0], vals[1])
        return self._two

    def bang_bridge(self, size: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Mutually inverse maps between [[!A]] families and T A, via the
        projection at the registered free algebra applied to the unit."""
        key = ("bang-bridge", size)
        hit = self._const_val.get(key)
        if hit is not None:
            return hit
        fa_idx = self.free_algebra_index(size)
        eta = self._free_units[fa_idx]
        env = TypeEnv().set(VSORT, "X", fm.FinSet(size))
        poly = self.interp_vtype(env, encodings.encode_bang(VVar("X")))
        assert isinstance(poly, PolySem)
        comp = poly.comps[fa_idx]
        assert isinstance(comp, FunSem)
        eta_elt = comp.dom.encode(list(eta))  # type: ignore[attr-defined]
        ta_size = self.algebras[fa_idx].carrier.size
        to_t = tuple(comp.apply(poly.fams[f][fa_idx], eta_elt) for f in range(poly.size))
        if sorted(to_t) != list(range(ta_size)):
            raise InterpError(
                f"[[!A]] does not biject with T A at |A|={size}: got {to_t} over {ta_size}"
            )
        from_t = _invert(to_t)
        self._const_val[key] = (to_t, from_t)
        return to_t, from_t

    def constant_value(self, name: str) -> int:
        hit = self._const_val.get(name)
        if hit is not None:
            return hit
        if name not in self.constants:
            raise InterpError(f"unknown constant {name!r}")
        scheme, key = self.constants[name]
        poly = self.interp_vtype(TypeEnv(), scheme)
        assert isinstance(poly, PolySem)
        if key == "or":
            fam = []
            for k, alg in enumerate(self.algebras):
                comp = poly.comps[k]
                assert isinstance(comp, FunSem)
                inner = comp.cod
                assert isinstance(inner, FunSem)
                outer = [
                    inner.encode([alg.op_or(x, y) for y in range(alg.carrier.size)])
                    for x in range(alg.carrier.size)
                ]
                fam.append(comp.encode(outer))
            val = poly.encode(tuple(fam))
        elif key.startswith("raise:"):
            e_idx = self.monad.exceptions.index(key.split(":", 1)[1])
            val = poly.encode(tuple(alg.raise_points[e_idx] for alg in self.algebras))
        elif key.startswith("handle:"):
            e_idx = self.monad.exceptions.index(key.split(":", 1)[1])
            i0, i1 = self.two_values()
            fam = []
            for s_idx, aset in enumerate(self.sets):
                comp = poly.comps[s_idx]
                assert isinstance(comp, HomSem)
                to_t, _ = self.bang_bridge(aset.size)
                dom = comp.dom
                table = []
                for u in range(dom.size):
                    p = dom.apply(u, i0)  # type: ignore[attr-defined]
                    q = dom.apply(u, i1)  # type: ignore[attr-defined]
                    table.append(q if to_t[p] == aset.size + e_idx else p)
                fam.append(comp.encode(table))
            val = poly.encode(tuple(fam))
        else:
            raise InterpError(f"unknown denotation key {key!r}")
        self._const_val[name] = val
        return val

def _invert(table: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(table)
    for i, v in enumerate(table):
        inv[v] = i
    return tuple(inv)




# ---------------------------------------------------------------------------
# structured values and dumps


@dataclass(frozen=True)
class SemValue:
    """Decoded denotation: a ground element, a function table, or a
    family table keyed by object id."""

    kind: str  # "ground" | "fun" | "poly"
    ground: Optional[int] = None
    entries: tuple = ()

    def to_json(self):
        if self.kind == "ground":
            return self.ground
        if self.kind == "fun":
            return [v.to_json() for v in self.entries]
        return {key: v.to_json() for key, v in self.entries}


def decode_value(model: Model, sem: SemSet, idx: int) -> SemValue:
    if isinstance(sem, AtomSem):
        return SemValue("ground", ground=idx)
    if isinstance(sem, (FunSem, HomSem)):
        entries = tuple(
            decode_value(model, sem.cod, sem.apply(idx, x)) for x in range(sem.dom.size)
        )
        return SemValue("fun", entries=entries)
    if isinstance(sem, PolySem):
        fam = sem.fams[idx]
        keys = (
            [f"alg:{k}" for k in range(len(model.algebras))]
            if sem.csort
            else [f"set:{k}" for k in range(len(model.sets))]
        )
        entries = tuple(
            (key, decode_value(model, comp, c)) for key, comp, c in zip(keys, sem.comps, fam)
        )
        return SemValue("poly", entries=entries)
    raise InterpError(f"cannot decode from {sem!r}")


def semset_to_json(model: Model, sem: SemSet):
    if isinstance(sem, AtomSem):
        return {"kind": "set", "size": sem.size}
    if isinstance(sem, FunSem):
        return {"kind": "functions", "size": sem.size,
                "dom": semset_to_json(model, sem.dom), "cod": semset_to_json(model, sem.cod)}
    if isinstance(sem, HomSem):
        return {"kind": "homomorphisms", "size": sem.size,
                "dom": semset_to_json(model, sem.dom), "cod": semset_to_json(model, sem.cod)}
    if isinstance(sem, PolySem):
        return {"kind": "families", "size": sem.size,
                "objects": len(model.algebras) if sem.csort else len(model.sets)}
    raise InterpError(f"cannot dump {sem!r}")


def dump_value(model: Model, sem: SemSet, idx: int) -> str:
    return json.dumps(
        {"set": semset_to_json(model, sem), "value": decode_value(model, sem, idx).to_json()},
        sort_keys=True,
    )
