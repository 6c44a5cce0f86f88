"""Abstract syntax for a two-sorted polymorphic calculus with a stoup.

Types are stratified into *value types* and a syntactic subclass of
*computation types* (every computation type is also a value type):

    value        A ::= X | B -> C | forall X. B | ^X | forall ^X. B | C -o D
    computation  C ::= ^X | B -> C | forall X. C | forall ^X. C

Value-type variables (``X``) and computation-type variables (``^X``)
are disjoint sorts.  ``C -o D`` classifies structure-preserving maps
between computation types and is itself only a value type; ``B -> C``
is a computation type exactly when its codomain is.

Judgments ``gamma | delta |- t : B`` carry an ordinary context plus an
optional stoup ``delta``: at most one binding, restricted to
computation types, forcing a computation-type result.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Union


class Kind(Enum):
    VALUE = "value"
    COMPUTATION = "computation"


class KindError(Exception):
    """A type is structurally ill-kinded (e.g. ``-o`` over a value type)."""


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class TypeExpr:
    pass


@dataclass(frozen=True)
class VVar(TypeExpr):
    name: str


@dataclass(frozen=True)
class CVar(TypeExpr):
    name: str


@dataclass(frozen=True)
class Arrow(TypeExpr):
    dom: TypeExpr
    cod: TypeExpr


@dataclass(frozen=True)
class Lolli(TypeExpr):
    dom: TypeExpr
    cod: TypeExpr


@dataclass(frozen=True)
class ForallV(TypeExpr):
    binder: str
    body: TypeExpr


@dataclass(frozen=True)
class ForallC(TypeExpr):
    binder: str
    body: TypeExpr


def classify_type(t: TypeExpr) -> Kind:
    """Decide whether ``t`` is a computation type or a value type only.

    Total and deterministic on well-formed trees.  Raises KindError when a
    ``-o`` has a non-computation operand, since no well-formed type may
    contain one.
    """
    if isinstance(t, VVar):
        return Kind.VALUE
    if isinstance(t, CVar):
        return Kind.COMPUTATION
    if isinstance(t, Arrow):
        classify_type(t.dom)
        return classify_type(t.cod)
    if isinstance(t, Lolli):
        if classify_type(t.dom) is not Kind.COMPUTATION:
            raise KindError(f"-o domain is not a computation type: {t.dom}")
        if classify_type(t.cod) is not Kind.COMPUTATION:
            raise KindError(f"-o codomain is not a computation type: {t.cod}")
        return Kind.VALUE
    if isinstance(t, (ForallV, ForallC)):
        return classify_type(t.body)
    # Extension point for surface sugar nodes, which know their own class.
    custom = getattr(t, "classify", None)
    if custom is not None:
        return custom()
    raise KindError(f"not a type expression: {t!r}")


def is_computation_type(t: TypeExpr) -> bool:
    return classify_type(t) is Kind.COMPUTATION


def free_type_vars(t: TypeExpr) -> frozenset[Union[VVar, CVar]]:
    """Free type variables of ``t``, as variable nodes (sort included)."""
    if isinstance(t, (VVar, CVar)):
        return frozenset([t])
    if isinstance(t, (Arrow, Lolli)):
        return free_type_vars(t.dom) | free_type_vars(t.cod)
    if isinstance(t, ForallV):
        return free_type_vars(t.body) - {VVar(t.binder)}
    if isinstance(t, ForallC):
        return free_type_vars(t.body) - {CVar(t.binder)}
    raise KindError(f"not a core type expression: {t!r}")


def all_type_var_names(x: Union["TypeExpr", "TermExpr"]) -> frozenset[str]:
    """Every type-variable name occurring in x, bound or free, both sorts."""
    out: set[str] = set()

    def go_ty(t):
        if isinstance(t, (VVar, CVar)):
            out.add(t.name)
        elif isinstance(t, (Arrow, Lolli)):
            go_ty(t.dom)
            go_ty(t.cod)
        elif isinstance(t, (ForallV, ForallC)):
            out.add(t.binder)
            go_ty(t.body)

    def go_tm(t):
        if isinstance(t, (Lam, LinLam)):
            go_ty(t.ann)
            go_tm(t.body)
        elif isinstance(t, App):
            go_tm(t.fn)
            go_tm(t.arg)
        elif isinstance(t, (TyLamV, TyLamC)):
            out.add(t.binder)
            go_tm(t.body)
        elif isinstance(t, (TyAppV, TyAppC)):
            go_tm(t.fn)
            go_ty(t.arg)

    if isinstance(x, TypeExpr):
        go_ty(x)
    else:
        go_tm(x)
    return frozenset(out)


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """First of base, base1, base2, ... not in ``avoid``."""
    avoid = set(avoid)
    if base not in avoid:
        return base
    stem = base.rstrip("0123456789") or base
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def subst_type(body: TypeExpr, var: Union[VVar, CVar], replacement: TypeExpr) -> TypeExpr:
    """Capture-avoiding substitution of ``replacement`` for ``var`` in ``body``.

    A computation-type variable only accepts a computation type.
    """
    if isinstance(var, CVar) and classify_type(replacement) is not Kind.COMPUTATION:
        raise KindError(
            f"cannot substitute value type {replacement} for computation variable ^{var.name}"
        )
    repl_fvs = free_type_vars(replacement)

    def go(t: TypeExpr) -> TypeExpr:
        if isinstance(t, (VVar, CVar)):
            return replacement if t == var else t
        if isinstance(t, Arrow):
            return Arrow(go(t.dom), go(t.cod))
        if isinstance(t, Lolli):
            return Lolli(go(t.dom), go(t.cod))
        if isinstance(t, (ForallV, ForallC)):
            bound = VVar(t.binder) if isinstance(t, ForallV) else CVar(t.binder)
            if bound == var:
                return t
            if bound in repl_fvs and var in free_type_vars(t.body):
                # rename the binder so the replacement is not captured
                taken = {v.name for v in free_type_vars(t.body) | repl_fvs}
                new = fresh_name(t.binder, taken | {var.name})
                new_bound = type(bound)(new)
                renamed = subst_type(t.body, bound, new_bound)
                return type(t)(new, go(renamed))
            return type(t)(t.binder, go(t.body))
        raise KindError(f"not a core type expression: {t!r}")

    return go(body)


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class TermExpr:
    pass


@dataclass(frozen=True)
class Var(TermExpr):
    name: str


@dataclass(frozen=True)
class Lam(TermExpr):
    var: str
    ann: TypeExpr
    body: TermExpr


@dataclass(frozen=True)
class LinLam(TermExpr):
    var: str
    ann: TypeExpr
    body: TermExpr


@dataclass(frozen=True)
class App(TermExpr):
    fn: TermExpr
    arg: TermExpr


@dataclass(frozen=True)
class TyLamV(TermExpr):
    binder: str
    body: TermExpr


@dataclass(frozen=True)
class TyLamC(TermExpr):
    binder: str
    body: TermExpr


@dataclass(frozen=True)
class TyAppV(TermExpr):
    fn: TermExpr
    arg: TypeExpr


@dataclass(frozen=True)
class TyAppC(TermExpr):
    fn: TermExpr
    arg: TypeExpr


@dataclass(frozen=True)
class Const(TermExpr):
    name: str


def ty_app(fn: TermExpr, arg: TypeExpr) -> TermExpr:
    """Build the type application node matching the argument's class."""
    if classify_type(arg) is Kind.COMPUTATION:
        return TyAppC(fn, arg)
    return TyAppV(fn, arg)


def free_term_vars(t: TermExpr) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Const):
        return frozenset()
    if isinstance(t, (Lam, LinLam)):
        return free_term_vars(t.body) - {t.var}
    if isinstance(t, App):
        return free_term_vars(t.fn) | free_term_vars(t.arg)
    if isinstance(t, (TyLamV, TyLamC)):
        return free_term_vars(t.body)
    if isinstance(t, (TyAppV, TyAppC)):
        return free_term_vars(t.fn)
    custom = getattr(t, "free_vars", None)
    if custom is not None:
        return custom()
    raise ValueError(f"not a term expression: {t!r}")


def free_type_vars_term(t: TermExpr) -> frozenset[Union[VVar, CVar]]:
    """Type variables occurring free in annotations and type arguments."""
    if isinstance(t, (Var, Const)):
        return frozenset()
    if isinstance(t, (Lam, LinLam)):
        return free_type_vars(t.ann) | free_type_vars_term(t.body)
    if isinstance(t, App):
        return free_type_vars_term(t.fn) | free_type_vars_term(t.arg)
    if isinstance(t, TyLamV):
        return free_type_vars_term(t.body) - {VVar(t.binder)}
    if isinstance(t, TyLamC):
        return free_type_vars_term(t.body) - {CVar(t.binder)}
    if isinstance(t, (TyAppV, TyAppC)):
        return free_type_vars_term(t.fn) | free_type_vars(t.arg)
    raise ValueError(f"not a core term expression: {t!r}")


def subst_type_in_term(t: TermExpr, var: Union[VVar, CVar], replacement: TypeExpr) -> TermExpr:
    """Substitute a type for a type variable throughout a term."""
    repl_fvs = free_type_vars(replacement)

    def go(t: TermExpr) -> TermExpr:
        if isinstance(t, (Var, Const)):
            return t
        if isinstance(t, (Lam, LinLam)):
            return type(t)(t.var, subst_type(t.ann, var, replacement), go(t.body))
        if isinstance(t, App):
            return App(go(t.fn), go(t.arg))
        if isinstance(t, (TyLamV, TyLamC)):
            bound = VVar(t.binder) if isinstance(t, TyLamV) else CVar(t.binder)
            if bound == var:
                return t
            if bound in repl_fvs and var in free_type_vars_term(t.body):
                taken = {v.name for v in free_type_vars_term(t.body) | repl_fvs}
                new = fresh_name(t.binder, taken | {var.name})
                renamed = subst_type_in_term(t.body, bound, type(bound)(new))
                return type(t)(new, go(renamed))
            return type(t)(t.binder, go(t.body))
        if isinstance(t, (TyAppV, TyAppC)):
            return type(t)(go(t.fn), subst_type(t.arg, var, replacement))
        raise ValueError(f"not a core term expression: {t!r}")

    return go(t)


def subst_term(body: TermExpr, var: str, replacement: TermExpr) -> TermExpr:
    """Capture-avoiding substitution of a term for a term variable.

    Both term binders and type binders are freshened on demand: a type
    abstraction must not capture type variables free in the replacement's
    annotations.
    """
    repl_tmvs = free_term_vars(replacement)
    repl_tyvs = free_type_vars_term(replacement)

    def go(t: TermExpr) -> TermExpr:
        if isinstance(t, Var):
            return replacement if t.name == var else t
        if isinstance(t, Const):
            return t
        if isinstance(t, (Lam, LinLam)):
            if t.var == var:
                return t
            if t.var in repl_tmvs and var in free_term_vars(t.body):
                taken = set(free_term_vars(t.body)) | repl_tmvs
                new = fresh_name(t.var, taken | {var})
                renamed = subst_term(t.body, t.var, Var(new))
                return type(t)(new, t.ann, go(renamed))
            return type(t)(t.var, t.ann, go(t.body))
        if isinstance(t, App):
            return App(go(t.fn), go(t.arg))
        if isinstance(t, (TyLamV, TyLamC)):
            bound = VVar(t.binder) if isinstance(t, TyLamV) else CVar(t.binder)
            if bound in repl_tyvs and var in free_term_vars(t.body):
                taken = {v.name for v in free_type_vars_term(t.body) | repl_tyvs}
                new = fresh_name(t.binder, taken)
                renamed = subst_type_in_term(t.body, bound, type(bound)(new))
                return type(t)(new, go(renamed))
            return type(t)(t.binder, go(t.body))
        if isinstance(t, (TyAppV, TyAppC)):
            return type(t)(go(t.fn), t.arg)
        raise ValueError(f"not a core term expression: {t!r}")

    return go(body)


# ---------------------------------------------------------------------------
# alpha-equivalence

Expr = Union[TypeExpr, TermExpr]


def _alpha_ty(a: TypeExpr, b: TypeExpr, env_a: dict, env_b: dict, depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, (VVar, CVar)):
        key = (type(a), a.name)
        key_b = (type(b), b.name)
        la, lb = env_a.get(key), env_b.get(key_b)
        if la is None and lb is None:
            return a.name == b.name
        return la is not None and la == lb
    if isinstance(a, (Arrow, Lolli)):
        return _alpha_ty(a.dom, b.dom, env_a, env_b, depth) and _alpha_ty(
            a.cod, b.cod, env_a, env_b, depth
        )
    if isinstance(a, (ForallV, ForallC)):
        sort = VVar if isinstance(a, ForallV) else CVar
        ea = dict(env_a)
        eb = dict(env_b)
        ea[(sort, a.binder)] = depth
        eb[(sort, b.binder)] = depth
        return _alpha_ty(a.body, b.body, ea, eb, depth + 1)
    raise KindError(f"not a core type expression: {a!r}")


def _alpha_tm(a: TermExpr, b: TermExpr, tya, tyb, tma, tmb, depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        la, lb = tma.get(a.name), tmb.get(b.name)
        if la is None and lb is None:
            return a.name == b.name
        return la is not None and la == lb
    if isinstance(a, Const):
        return a.name == b.name
    if isinstance(a, (Lam, LinLam)):
        if not _alpha_ty(a.ann, b.ann, tya, tyb, depth):
            return False
        ma, mb = dict(tma), dict(tmb)
        ma[a.var] = depth
        mb[b.var] = depth
        return _alpha_tm(a.body, b.body, tya, tyb, ma, mb, depth + 1)
    if isinstance(a, App):
        return _alpha_tm(a.fn, b.fn, tya, tyb, tma, tmb, depth) and _alpha_tm(
            a.arg, b.arg, tya, tyb, tma, tmb, depth
        )
    if isinstance(a, (TyLamV, TyLamC)):
        sort = VVar if isinstance(a, TyLamV) else CVar
        ea, eb = dict(tya), dict(tyb)
        ea[(sort, a.binder)] = depth
        eb[(sort, b.binder)] = depth
        return _alpha_tm(a.body, b.body, ea, eb, tma, tmb, depth + 1)
    if isinstance(a, (TyAppV, TyAppC)):
        return _alpha_tm(a.fn, b.fn, tya, tyb, tma, tmb, depth) and _alpha_ty(
            a.arg, b.arg, tya, tyb, depth
        )
    raise ValueError(f"not a core term expression: {a!r}")


def alpha_eq(a: Expr, b: Expr) -> bool:
    """Equality modulo consistent renaming of bound variables."""
    if isinstance(a, TypeExpr) and isinstance(b, TypeExpr):
        return _alpha_ty(a, b, {}, {}, 0)
    if isinstance(a, TermExpr) and isinstance(b, TermExpr):
        return _alpha_tm(a, b, {}, {}, {}, {}, 0)
    return False


def alpha_canonical(t: TypeExpr) -> TypeExpr:
    """Rename bound variables to a canonical numbering (for set-based dedup)."""
    counter = [0]

    def go(t: TypeExpr, env: dict) -> TypeExpr:
        if isinstance(t, (VVar, CVar)):
            return env.get((type(t), t.name), t)
        if isinstance(t, (Arrow, Lolli)):
            return type(t)(go(t.dom, env), go(t.cod, env))
        if isinstance(t, (ForallV, ForallC)):
            sort = VVar if isinstance(t, ForallV) else CVar
            name = f"b{counter[0]}"
            counter[0] += 1
            env2 = dict(env)
            env2[(sort, t.binder)] = sort(name)
            return type(t)(name, go(t.body, env2))
        raise KindError(f"not a core type expression: {t!r}")

    return go(t, {})


# ---------------------------------------------------------------------------
# judgments


@dataclass(frozen=True)
class Judgment:
    """``gamma | delta |- subject : ascription`` (ascription optional)."""

    gamma: tuple[tuple[str, TypeExpr], ...]
    delta: Optional[tuple[str, TypeExpr]]
    subject: TermExpr
    ascription: Optional[TypeExpr] = None

    def validate(self) -> None:
        names = [n for n, _ in self.gamma]
        if self.delta is not None:
            if self.delta[0] in names:
                raise ValueError(
                    f"stoup variable {self.delta[0]!r} also bound in the ordinary context"
                )
            if classify_type(self.delta[1]) is not Kind.COMPUTATION:
                raise KindError(f"stoup type is not a computation type: {self.delta[1]}")
