"""Derived types and terms definable by polymorphism.

Value-type encodings (products, sums, existentials, mu/nu) follow the
standard second-order impredicative definitions; computation-type
encodings route elimination through ``-o`` so the result is again a
computation type.  The monadic type ``!B`` is the polymorphic
continuation type ``forall ^X. (B -> ^X) -> ^X`` with ``^X`` ranging
over computation types only, and ``bang``/``let`` are definable sugar
rather than primitives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

from . import surface, typecheck as tc
from .kernel import (
    App,
    Arrow,
    Const,
    CVar,
    ForallC,
    ForallV,
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
    all_type_var_names,
    classify_type,
    free_term_vars,
    free_type_vars,
    fresh_name,
)


class PositivityError(Exception):
    """A mu/nu binder occurs at a negative position in its body."""


class EncodingError(Exception):
    pass


def occurs_positively(var, ty: TypeExpr, positive: bool = True) -> bool:
    """Strict syntactic positivity: ``var`` never left of an odd number of arrows."""
    if isinstance(ty, (VVar, CVar)):
        return positive if ty == var else True
    if isinstance(ty, (Arrow, Lolli)):
        return occurs_positively(var, ty.dom, not positive) and occurs_positively(
            var, ty.cod, positive
        )
    if isinstance(ty, ForallV):
        if var == VVar(ty.binder):
            return True
        return occurs_positively(var, ty.body, positive)
    if isinstance(ty, ForallC):
        if var == CVar(ty.binder):
            return True
        return occurs_positively(var, ty.body, positive)
    raise EncodingError(f"not a core type: {ty!r}")


def _freshv(base: str, *exprs) -> str:
    taken = set()
    for x in exprs:
        taken |= all_type_var_names(x)
    return fresh_name(base, taken)


# ---------------------------------------------------------------------------
# value-type encodings

VALUE_CTORS = ("Unit", "Prod", "Zero", "Sum", "ExistsV", "Mu", "Nu", "ExistsC")
COMP_CTORS = (
    "UnitC",
    "ProdC",
    "ZeroC",
    "Oplus",
    "Copower",
    "ExistsVC",
    "ExistsCC",
    "MuC",
    "NuC",
)


def encode_value_type(ctor: str, args: Sequence = ()) -> TypeExpr:
    """Expand a definable value type to its polymorphic definition."""
    if ctor == "Unit":
        x = "X"
        return ForallV(x, Arrow(VVar(x), VVar(x)))
    if ctor == "Prod":
        a, b = args
        x = _freshv("X", a, b)
        return ForallV(x, Arrow(Arrow(a, Arrow(b, VVar(x))), VVar(x)))
    if ctor == "Zero":
        return ForallV("X", VVar("X"))
    if ctor == "Sum":
        a, b = args
        x = _freshv("X", a, b)
        return ForallV(x, Arrow(Arrow(a, VVar(x)), Arrow(Arrow(b, VVar(x)), VVar(x))))
    if ctor == "ExistsV":
        binder, body = args
        y = fresh_name("Y", {v.name for v in free_type_vars(body)} | {binder})
        return ForallV(y, Arrow(ForallV(binder, Arrow(body, VVar(y))), VVar(y)))
    if ctor == "Mu":
        binder, body = args
        if not occurs_positively(VVar(binder), body):
            raise PositivityError(f"{binder} occurs negatively in {body}")
        return ForallV(binder, Arrow(Arrow(body, VVar(binder)), VVar(binder)))
    if ctor == "Nu":
        binder, body = args
        if not occurs_positively(VVar(binder), body):
            raise PositivityError(f"{binder} occurs negatively in {body}")
        packed = encode_value_type("Prod", (Arrow(VVar(binder), body), VVar(binder)))
        return encode_value_type("ExistsV", (binder, packed))
    if ctor == "ExistsC":
        binder, body = args
        y = fresh_name("Y", {v.name for v in free_type_vars(body)} | {binder})
        return ForallV(y, Arrow(ForallC(binder, Arrow(body, VVar(y))), VVar(y)))
    raise EncodingError(f"unknown value-type constructor {ctor!r}")


def encode_comp_type(ctor: str, args: Sequence = ()) -> TypeExpr:
    """Expand a definable computation type; the result classifies as one."""
    if ctor == "UnitC":
        x = "X"
        return ForallC(x, Arrow(encode_value_type("Zero"), CVar(x)))
    if ctor == "ProdC":
        a, b = args
        x = _freshv("X", a, b)
        branches = encode_value_type("Sum", (Lolli(a, CVar(x)), Lolli(b, CVar(x))))
        return ForallC(x, Arrow(branches, CVar(x)))
    if ctor == "ZeroC":
        return ForallC("X", CVar("X"))
    if ctor == "Oplus":
        a, b = args
        x = _freshv("X", a, b)
        return ForallC(x, Arrow(Lolli(a, CVar(x)), Arrow(Lolli(b, CVar(x)), CVar(x))))
    if ctor == "Copower":
        weight, a = args
        x = _freshv("X", weight, a)
        return ForallC(x, Arrow(Arrow(weight, Lolli(a, CVar(x))), CVar(x)))
    if ctor == "ExistsVC":
        binder, body = args
        y = fresh_name("Y", {v.name for v in free_type_vars(body)} | {binder})
        return ForallC(y, Arrow(ForallV(binder, Lolli(body, CVar(y))), CVar(y)))
    if ctor == "ExistsCC":
        binder, body = args
        y = fresh_name("Y", {v.name for v in free_type_vars(body)} | {binder})
        return ForallC(y, Arrow(ForallC(binder, Lolli(body, CVar(y))), CVar(y)))
    if ctor == "MuC":
        binder, body = args
        if not occurs_positively(CVar(binder), body):
            raise PositivityError(f"^{binder} occurs negatively in {body}")
        return ForallC(binder, Arrow(Lolli(body, CVar(binder)), CVar(binder)))
    if ctor == "NuC":
        binder, body = args
        if not occurs_positively(CVar(binder), body):
            raise PositivityError(f"^{binder} occurs negatively in {body}")
        packed = encode_comp_type("Copower", (Lolli(CVar(binder), body), CVar(binder)))
        return encode_comp_type("ExistsCC", (binder, packed))
    raise EncodingError(f"unknown computation-type constructor {ctor!r}")


def encode_num(n: int) -> TypeExpr:
    """n-fold sum 1 + (1 + ...); 0 is the empty type."""
    if n == 0:
        return encode_value_type("Zero")
    if n == 1:
        return encode_value_type("Unit")
    return encode_value_type("Sum", (encode_value_type("Unit"), encode_num(n - 1)))


def encode_bang(b: TypeExpr) -> TypeExpr:
    """``!B = forall ^X. (B -> ^X) -> ^X`` with a fresh ``^X``."""
    x = _freshv("X", b)
    return ForallC(x, Arrow(Arrow(b, CVar(x)), CVar(x)))


def bang_payload(ty: TypeExpr) -> Optional[TypeExpr]:
    """Return B when ``ty`` has the shape of ``!B``, else None."""
    if not isinstance(ty, ForallC):
        return None
    body = ty.body
    x = CVar(ty.binder)
    if (
        isinstance(body, Arrow)
        and isinstance(body.dom, Arrow)
        and body.cod == x
        and body.dom.cod == x
        and x not in free_type_vars(body.dom.dom)
    ):
        return body.dom.dom
    return None


# ---------------------------------------------------------------------------
# term-level sugar


def _fresh_tm(base: str, *terms: TermExpr) -> str:
    taken = set()
    for t in terms:
        taken |= free_term_vars(t)
    return fresh_name(base, taken)


def elaborate_bang_intro(t: TermExpr, payload: TypeExpr) -> TermExpr:
    """``bang t``: the thunked computation ``Fun ^X => fun p:B->^X => p t``."""
    x = _freshv("X", payload, t)
    p = _fresh_tm("p", t)
    return TyLamC(x, Lam(p, Arrow(payload, CVar(x)), App(Var(p), t)))


def elaborate_let(x: str, t: TermExpr, u: TermExpr, payload: TypeExpr, result: TypeExpr) -> TermExpr:
    """``let x <= t in u``  ==>  ``t @[A] (fun x:B => u)``."""
    return App(TyAppC(t, result), Lam(x, payload, u))


def unit_term() -> TermExpr:
    return TyLamV("X", Lam("u", VVar("X"), Var("u")))


def pair_term(a: TypeExpr, b: TypeExpr, t: TermExpr, u: TermExpr) -> TermExpr:
    x = _freshv("X", a, b, t, u)
    p = _fresh_tm("p", t, u)
    return TyLamV(x, Lam(p, Arrow(a, Arrow(b, VVar(x))), App(App(Var(p), t), u)))


def inl_term(a: TypeExpr, b: TypeExpr, t: TermExpr) -> TermExpr:
    x = _freshv("X", a, b, t)
    f = _fresh_tm("f", t)
    g = fresh_name("g", {f} | free_term_vars(t))
    return TyLamV(
        x,
        Lam(f, Arrow(a, VVar(x)), Lam(g, Arrow(b, VVar(x)), App(Var(f), t))),
    )


def inr_term(a: TypeExpr, b: TypeExpr, t: TermExpr) -> TermExpr:
    x = _freshv("X", a, b, t)
    f = _fresh_tm("f", t)
    g = fresh_name("g", {f} | free_term_vars(t))
    return TyLamV(
        x,
        Lam(f, Arrow(a, VVar(x)), Lam(g, Arrow(b, VVar(x)), App(Var(g), t))),
    )


def case_term(scrutinee: TermExpr, result: TypeExpr, on_l: TermExpr, on_r: TermExpr) -> TermExpr:
    node = TyAppC if classify_type(result) is Kind.COMPUTATION else TyAppV
    return App(App(node(scrutinee, result), on_l), on_r)


def oplus_inl(a: TypeExpr, b: TypeExpr, t: TermExpr) -> TermExpr:
    x = _freshv("X", a, b, t)
    f = _fresh_tm("f", t)
    g = fresh_name("g", {f} | free_term_vars(t))
    return TyLamC(
        x,
        Lam(f, Lolli(a, CVar(x)), Lam(g, Lolli(b, CVar(x)), App(Var(f), t))),
    )


def oplus_inr(a: TypeExpr, b: TypeExpr, t: TermExpr) -> TermExpr:
    x = _freshv("X", a, b, t)
    f = _fresh_tm("f", t)
    g = fresh_name("g", {f} | free_term_vars(t))
    return TyLamC(
        x,
        Lam(f, Lolli(a, CVar(x)), Lam(g, Lolli(b, CVar(x)), App(Var(g), t))),
    )


def oplus_case(scrutinee: TermExpr, result: TypeExpr, on_l: TermExpr, on_r: TermExpr) -> TermExpr:
    return App(App(TyAppC(scrutinee, result), on_l), on_r)


def two_value(which: int) -> TermExpr:
    """The two closed inhabitants of ``2 = 1 + 1``; 0 is the left one."""
    unit = encode_value_type("Unit")
    t = unit_term()
    return inl_term(unit, unit, t) if which == 0 else inr_term(unit, unit, t)


def girard_iso_terms(a: TypeExpr, bc: TypeExpr) -> tuple[TermExpr, TermExpr]:
    """Mutually inverse maps between ``A -> B°`` and ``!A -o B°``."""
    if classify_type(bc) is not Kind.COMPUTATION:
        raise EncodingError(f"{bc} is not a computation type")
    bang_a = encode_bang(a)
    fwd = Lam(
        "f",
        Arrow(a, bc),
        LinLam(
            "z",
            bang_a,
            App(TyAppC(Var("z"), bc), Lam("x", a, App(Var("f"), Var("x")))),
        ),
    )
    bwd = Lam(
        "g",
        Lolli(bang_a, bc),
        Lam("x", a, App(Var("g"), elaborate_bang_intro(Var("x"), a))),
    )
    return fwd, bwd


def comp_iso_terms(ac: TypeExpr) -> tuple[TermExpr, TermExpr]:
    """Mutually inverse maps between ``A°`` and ``forall ^X. (A° -o ^X) -> ^X``.

    The wrapped type is the inductive-type encoding applied to a constant
    body, so this isomorphism is the degenerate instance of those types.
    """
    if classify_type(ac) is not Kind.COMPUTATION:
        raise EncodingError(f"{ac} is not a computation type")
    x = _freshv("X", ac)
    wrapped = encode_comp_type("MuC", (x, ac))
    fwd = LinLam(
        "a",
        ac,
        TyLamC(x, Lam("k", Lolli(ac, CVar(x)), App(Var("k"), Var("a")))),
    )
    bwd = LinLam("m", wrapped, App(TyAppC(Var("m"), ac), LinLam("y", ac, Var("y"))))
    return fwd, bwd


# ---------------------------------------------------------------------------
# constants


@dataclass(frozen=True)
class ConstantSig:
    name: str
    scheme: TypeExpr
    denotation_key: str

    def __post_init__(self):
        if free_type_vars(self.scheme):
            raise EncodingError(f"constant scheme must be closed: {self.scheme}")
        classify_type(self.scheme)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "type": surface.print_type(self.scheme),
            "denotation-key": self.denotation_key,
        }


def register_effect_constants(monad_key: str, exceptions: Sequence[str] = ()) -> list[ConstantSig]:
    """Constant signatures induced by a monad choice."""
    if monad_key == "identity":
        return []
    if monad_key == "powerset":
        scheme = ForallC("X", Arrow(CVar("X"), Arrow(CVar("X"), CVar("X"))))
        return [ConstantSig("or", scheme, "or")]
    if monad_key == "exception":
        sigs = []
        two = encode_num(2)
        for e in exceptions:
            sigs.append(ConstantSig(f"raise^{e}", ForallC("X", CVar("X")), f"raise:{e}"))
        for e in exceptions:
            bang_x = encode_bang(VVar("X"))
            handler = ForallV("X", Lolli(Arrow(two, bang_x), bang_x))
            sigs.append(ConstantSig(f"handle^{e}", handler, f"handle:{e}"))
        return sigs
    raise EncodingError(f"unknown monad key {monad_key!r}")


def constants_table(sigs: Sequence[ConstantSig]) -> dict[str, TypeExpr]:
    return {sig.name: sig.scheme for sig in sigs}


def dump_constants(sigs: Sequence[ConstantSig]) -> str:
    return json.dumps([s.to_json() for s in sigs], indent=2)


# ---------------------------------------------------------------------------
# CBPV type-level translation


@dataclass(frozen=True)
class CbpvType:
    pass


@dataclass(frozen=True)
class CbpvUnit(CbpvType):
    pass


@dataclass(frozen=True)
class CbpvZero(CbpvType):
    pass


@dataclass(frozen=True)
class CbpvProd(CbpvType):
    left: CbpvType
    right: CbpvType


@dataclass(frozen=True)
class CbpvSum(CbpvType):
    left: CbpvType
    right: CbpvType


@dataclass(frozen=True)
class CbpvU(CbpvType):
    comp: CbpvType


@dataclass(frozen=True)
class CbpvF(CbpvType):
    value: CbpvType


@dataclass(frozen=True)
class CbpvFun(CbpvType):
    dom: CbpvType
    cod: CbpvType


@dataclass(frozen=True)
class CbpvProdC(CbpvType):
    left: CbpvType
    right: CbpvType


def cbpv_translate_type(t: CbpvType) -> TypeExpr:
    """Map CBPV types into the calculus: F via !, U erased, products/sums encoded."""
    if isinstance(t, CbpvUnit):
        return encode_value_type("Unit")
    if isinstance(t, CbpvZero):
        return encode_value_type("Zero")
    if isinstance(t, CbpvProd):
        return encode_value_type("Prod", (cbpv_translate_type(t.left), cbpv_translate_type(t.right)))
    if isinstance(t, CbpvSum):
        return encode_value_type("Sum", (cbpv_translate_type(t.left), cbpv_translate_type(t.right)))
    if isinstance(t, CbpvU):
        return cbpv_translate_type(t.comp)
    if isinstance(t, CbpvF):
        return encode_bang(cbpv_translate_type(t.value))
    if isinstance(t, CbpvFun):
        return Arrow(cbpv_translate_type(t.dom), cbpv_translate_type(t.cod))
    if isinstance(t, CbpvProdC):
        return encode_comp_type(
            "ProdC", (cbpv_translate_type(t.left), cbpv_translate_type(t.right))
        )
    raise EncodingError(f"unknown CBPV type {t!r}")


# ---------------------------------------------------------------------------
# sugar elaboration


def elaborate_type(t: TypeExpr, abbrevs: dict = {}) -> TypeExpr:
    """Expand surface sugar nodes into the core grammar, bottom-up.

    ``abbrevs`` maps declared type names to (already core) expansions; a
    name shadowed by a quantifier stays a variable.
    """
    return _elaborate_type(t, abbrevs)


def _elaborate_type(t: TypeExpr, abbrevs: dict) -> TypeExpr:
    def elaborate_type(u):
        return _elaborate_type(u, abbrevs)

    if isinstance(t, VVar):
        return abbrevs.get(t.name, t)
    if isinstance(t, CVar):
        return t
    if isinstance(t, Arrow):
        return Arrow(elaborate_type(t.dom), elaborate_type(t.cod))
    if isinstance(t, Lolli):
        return Lolli(elaborate_type(t.dom), elaborate_type(t.cod))
    if isinstance(t, ForallV):
        inner = {k: v for k, v in abbrevs.items() if k != t.binder}
        return ForallV(t.binder, _elaborate_type(t.body, inner))
    if isinstance(t, ForallC):
        return ForallC(t.binder, elaborate_type(t.body))
    if isinstance(t, surface.UnitT):
        return encode_value_type("Unit")
    if isinstance(t, surface.ZeroT):
        return encode_value_type("Zero")
    if isinstance(t, surface.NumT):
        return encode_num(t.n)
    if isinstance(t, surface.ProdT):
        return encode_value_type("Prod", (elaborate_type(t.left), elaborate_type(t.right)))
    if isinstance(t, surface.SumT):
        return encode_value_type("Sum", (elaborate_type(t.left), elaborate_type(t.right)))
    if isinstance(t, surface.Bang):
        return encode_bang(elaborate_type(t.arg))
    if isinstance(t, surface.UnitCT):
        return encode_comp_type("UnitC")
    if isinstance(t, surface.ZeroCT):
        return encode_comp_type("ZeroC")
    if isinstance(t, surface.ProdCT):
        return encode_comp_type("ProdC", (elaborate_type(t.left), elaborate_type(t.right)))
    if isinstance(t, surface.OplusT):
        return encode_comp_type("Oplus", (elaborate_type(t.left), elaborate_type(t.right)))
    if isinstance(t, surface.CopowerT):
        return encode_comp_type("Copower", (elaborate_type(t.weight), elaborate_type(t.arg)))
    if isinstance(t, surface.BinderT):
        inner = abbrevs if t.csort else {k: v for k, v in abbrevs.items() if k != t.binder}
        body = _elaborate_type(t.body, inner)
        body_comp = classify_type(body) is Kind.COMPUTATION
        if t.ctor == "exists":
            if t.csort:
                ctor = "ExistsCC" if body_comp else "ExistsC"
            else:
                ctor = "ExistsVC" if body_comp else "ExistsV"
            if ctor in ("ExistsVC", "ExistsCC"):
                return encode_comp_type(ctor, (t.binder, body))
            return encode_value_type(ctor, (t.binder, body))
        if t.ctor == "mu":
            if t.csort:
                return encode_comp_type("MuC", (t.binder, body))
            return encode_value_type("Mu", (t.binder, body))
        if t.ctor == "nu":
            if t.csort:
                return encode_comp_type("NuC", (t.binder, body))
            return encode_value_type("Nu", (t.binder, body))
    raise EncodingError(f"cannot elaborate type {t!r}")


def elaborate_term(
    t: TermExpr,
    gamma: tc.Ctx = (),
    delta: tc.Stoup = None,
    constants: tc.Constants = {},
    abbrevs: dict = {},
) -> TermExpr:
    """Expand term sugar, threading the stoup the way the checker will.

    ``let x <= t in u`` is type-directed: the bound term must have a
    ``!B`` type, and the body fixes the result type.
    """
    if isinstance(t, (Var, Const)):
        return t
    if isinstance(t, Lam):
        ann = elaborate_type(t.ann, abbrevs)
        body = elaborate_term(t.body, gamma + ((t.var, ann),), delta, constants, abbrevs)
        return Lam(t.var, ann, body)
    if isinstance(t, LinLam):
        ann = elaborate_type(t.ann, abbrevs)
        body = elaborate_term(t.body, gamma, (t.var, ann), constants, abbrevs)
        return LinLam(t.var, ann, body)
    if isinstance(t, App):
        if delta is None:
            return App(
                elaborate_term(t.fn, gamma, None, constants, abbrevs),
                elaborate_term(t.arg, gamma, None, constants, abbrevs),
            )
        side = tc.route_stoup(delta, t.fn, t.arg)
        dfn, darg = (delta, None) if side == "fn" else (None, delta)
        return App(
            elaborate_term(t.fn, gamma, dfn, constants, abbrevs),
            elaborate_term(t.arg, gamma, darg, constants, abbrevs),
        )
    if isinstance(t, (TyLamV, TyLamC)):
        inner = abbrevs
        if isinstance(t, TyLamV):
            inner = {k: v for k, v in abbrevs.items() if k != t.binder}
        return type(t)(t.binder, elaborate_term(t.body, gamma, delta, constants, inner))
    if isinstance(t, (TyAppV, TyAppC)):
        fn = elaborate_term(t.fn, gamma, delta, constants, abbrevs)
        arg = elaborate_type(t.arg, abbrevs)
        # re-route through the argument's true class, which sugar may have hidden
        node = TyAppC if classify_type(arg) is Kind.COMPUTATION else TyAppV
        return node(fn, arg)
    if isinstance(t, surface.BangTerm):
        if delta is not None:
            raise tc.TypingError(
                tc.ErrorCode.STOUP_VIOLATION, "bang body cannot consume the stoup"
            )
        arg = elaborate_term(t.arg, gamma, None, constants, abbrevs)
        payload = tc.synth(gamma, None, arg, constants)
        return elaborate_bang_intro(arg, payload)
    if isinstance(t, surface.LetTerm):
        bound = elaborate_term(t.bound, gamma, delta, constants, abbrevs)
        bound_ty = tc.synth(gamma, delta, bound, constants)
        payload = bang_payload(bound_ty)
        if payload is None:
            raise tc.TypingError(
                tc.ErrorCode.APP_MISMATCH,
                f"let expects a !-typed bound term, got {bound_ty}",
            )
        body = elaborate_term(t.body, gamma + ((t.var, payload),), None, constants, abbrevs)
        result = tc.synth(gamma + ((t.var, payload),), None, body, constants)
        if classify_type(result) is not Kind.COMPUTATION:
            raise tc.TypingError(
                tc.ErrorCode.KIND_MISMATCH,
                f"let body must have a computation type, got {result}",
            )
        return elaborate_let(t.var, bound, body, payload, result)
    raise EncodingError(f"cannot elaborate term {t!r}")
