"""Seeded generation of well-typed judgments.

Terms are grown goal-directed: given a context and a goal type, pick an
introduction form for the goal, a matching variable, or an elimination
(application / type application) whose head is generated recursively.
Generation backtracks by returning None on a dead end; callers retry.
Every produced judgment re-checks under ``typecheck``.
"""

from __future__ import annotations

import random
from typing import Optional

from . import typecheck as tc
from .kernel import (
    App,
    Arrow,
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
    alpha_eq,
    classify_type,
    free_type_vars,
    fresh_name,
    subst_type,
)

VALUE_TYVARS = ("X", "Y")
COMP_TYVARS = ("P", "Q")


class TermGenerator:
    def __init__(self, seed: int, max_type_depth: int = 2, fuel: int = 5,
                 interp_safe: bool = False):
        self.rng = random.Random(seed)
        self.max_type_depth = max_type_depth
        self.fuel = fuel
        # restrict type-application arguments to variables, so every
        # projection stays at a registered object of a bounded model
        self.interp_safe = interp_safe
        self._counter = 0

    # -- types ----------------------------------------------------------

    def random_type(self, depth: Optional[int] = None, want: Optional[Kind] = None) -> TypeExpr:
        rng = self.rng
        if depth is None:
            depth = self.max_type_depth
        if depth <= 0:
            if want is Kind.COMPUTATION:
                return CVar(rng.choice(COMP_TYVARS))
            if want is Kind.VALUE:
                return VVar(rng.choice(VALUE_TYVARS))
            return rng.choice([VVar(rng.choice(VALUE_TYVARS)), CVar(rng.choice(COMP_TYVARS))])
        shapes = ["var", "arrow", "forallv", "forallc"]
        if want is not Kind.COMPUTATION:
            shapes.append("lolli")
        shape = rng.choice(shapes)
        if shape == "var":
            return self.random_type(0, want)
        if shape == "arrow":
            dom = self.random_type(depth - 1, None)
            cod = self.random_type(depth - 1, want)
            return Arrow(dom, cod)
        if shape == "lolli":
            return Lolli(
                self.random_type(depth - 1, Kind.COMPUTATION),
                self.random_type(depth - 1, Kind.COMPUTATION),
            )
        binder = f"B{self._fresh()}"
        if shape == "forallv":
            body = self.random_type(depth - 1, want)
            # keep the bound variable in play occasionally
            if want is not Kind.COMPUTATION and self.rng.random() < 0.5:
                body = Arrow(VVar(binder), body) if self.rng.random() < 0.5 else VVar(binder)
            return ForallV(binder, body)
        body = self.random_type(depth - 1, want)
        if want is not Kind.COMPUTATION and self.rng.random() < 0.5:
            body = CVar(binder) if self.rng.random() < 0.5 else Arrow(CVar(binder), body)
        return ForallC(binder, body)

    def _fresh(self) -> int:
        self._counter += 1
        return self._counter

    # -- terms ----------------------------------------------------------

    def term_for(self, gamma, delta, goal: TypeExpr, fuel: int) -> Optional[TermExpr]:
        rng = self.rng
        options = []
        # variables and the stoup axiom
        if delta is not None:
            if alpha_eq(delta[1], goal):
                options.append(("stoup", None))
        else:
            for name, ty in gamma:
                if alpha_eq(ty, goal):
                    options.append(("var", name))
        if fuel > 0:
            if isinstance(goal, Arrow):
                options.append(("lam", None))
            if isinstance(goal, Lolli) and delta is None:
                options.append(("linlam", None))
            if isinstance(goal, ForallV):
                options.append(("tylamv", None))
            if isinstance(goal, ForallC):
                options.append(("tylamc", None))
            if delta is None or classify_type(goal) is Kind.COMPUTATION:
                options.append(("app", None))
                options.append(("tyapp", None))
        if not options:
            return None
        rng.shuffle(options)
        for kind, payload in options:
            t = self._try(kind, payload, gamma, delta, goal, fuel)
            if t is not None:
                return t
        return None

    def _try(self, kind, payload, gamma, delta, goal, fuel) -> Optional[TermExpr]:
        rng = self.rng
        if kind == "stoup":
            return Var(delta[0])
        if kind == "var":
            return Var(payload)
        if kind == "lam":
            x = f"v{self._fresh()}"
            body = self.term_for(gamma + ((x, goal.dom),), delta, goal.cod, fuel - 1)
            return None if body is None else Lam(x, goal.dom, body)
        if kind == "linlam":
            x = f"v{self._fresh()}"
            body = self.term_for(gamma, (x, goal.dom), goal.cod, fuel - 1)
            return None if body is None else LinLam(x, goal.dom, body)
        if kind in ("tylamv", "tylamc"):
            sort = VVar if kind == "tylamv" else CVar
            bound = sort(goal.binder)
            if bound in tc._ctx_ftv(gamma, delta):
                taken = {v.name for v in tc._ctx_ftv(gamma, delta) | free_type_vars(goal.body)}
                new = fresh_name(goal.binder, taken)
                body_ty = subst_type(goal.body, bound, sort(new))
                binder = new
            else:
                body_ty, binder = goal.body, goal.binder
            body = self.term_for(gamma, delta, body_ty, fuel - 1)
            if body is None:
                return None
            return (TyLamV if kind == "tylamv" else TyLamC)(binder, body)
        if kind == "app":
            # pick the elimination shape: ordinary or linear application
            goal_comp = classify_type(goal) is Kind.COMPUTATION
            use_lolli = goal_comp and (delta is not None or rng.random() < 0.3)
            if use_lolli:
                dom = self.random_type(rng.randint(0, 1), Kind.COMPUTATION)
                head = self.term_for(gamma, None, Lolli(dom, goal), fuel - 1)
                if head is None:
                    return None
                arg = self.term_for(gamma, delta, dom, fuel - 1)
                return None if arg is None else App(head, arg)
            dom = self.random_type(rng.randint(0, 1), None)
            head = self.term_for(gamma, delta, Arrow(dom, goal), fuel - 1)
            if head is None:
                return None
            arg = self.term_for(gamma, None, dom, fuel - 1)
            return None if arg is None else App(head, arg)
        if kind == "tyapp":
            # instantiate a vacuous quantification at a random type
            binder = f"B{self._fresh()}"
            depth = 0 if self.interp_safe else rng.randint(0, 1)
            if rng.random() < 0.5:
                arg = self.random_type(depth, None if not self.interp_safe else Kind.VALUE)
                if classify_type(arg) is Kind.COMPUTATION:
                    return None
                head = self.term_for(gamma, delta, ForallV(binder, goal), fuel - 1)
                return None if head is None else TyAppV(head, arg)
            arg = self.random_type(depth, Kind.COMPUTATION)
            head = self.term_for(gamma, delta, ForallC(binder, goal), fuel - 1)
            return None if head is None else TyAppC(head, arg)
        return None

    # -- judgments --------------------------------------------------------

    def random_context(self, n: Optional[int] = None):
        if n is None:
            n = self.rng.randint(0, 2)
        return tuple((f"g{self._fresh()}", self.random_type(self.rng.randint(0, 2))) for _ in range(n))

    def random_judgment(self, attempts: int = 200, with_stoup: Optional[bool] = None) -> Judgment:
        for _ in range(attempts):
            gamma = self.random_context()
            stoup = self.rng.random() < 0.4 if with_stoup is None else with_stoup
            if stoup:
                delta = (f"s{self._fresh()}", self.random_type(self.rng.randint(0, 1), Kind.COMPUTATION))
                goal = self.random_type(self.rng.randint(0, 2), Kind.COMPUTATION)
            else:
                delta = None
                goal = self.random_type()
            t = self.term_for(gamma, delta, goal, self.fuel)
            if t is None:
                continue
            j = Judgment(gamma, delta, t, None)
            try:
                ty = tc.typecheck(j)
            except tc.TypingError:
                continue
            if alpha_eq(ty, goal):
                return Judgment(gamma, delta, t, ty)
        raise RuntimeError("exhausted attempts while generating a judgment")

    def random_subst_sample(self, part: int, attempts: int = 400) -> tc.SubstSample:
        for _ in range(attempts):
            gamma = self.random_context(self.rng.randint(0, 1))
            x = f"x{self._fresh()}"
            if part == 1:
                a = self.random_type(self.rng.randint(0, 2))
                use_stoup = self.rng.random() < 0.3
                if use_stoup:
                    delta = (f"s{self._fresh()}", self.random_type(1, Kind.COMPUTATION))
                    goal = self.random_type(self.rng.randint(0, 2), Kind.COMPUTATION)
                else:
                    delta = None
                    goal = self.random_type(self.rng.randint(0, 2))
                t = self.term_for(gamma + ((x, a),), delta, goal, self.fuel)
                s = self.term_for(gamma, None, a, self.fuel)
                if t is None or s is None:
                    continue
                return tc.SubstSample(1, gamma, delta, x, a, t, s)
            a = self.random_type(self.rng.randint(0, 1), Kind.COMPUTATION)
            goal = self.random_type(self.rng.randint(0, 2), Kind.COMPUTATION)
            t = self.term_for(gamma, (x, a), goal, self.fuel)
            use_stoup = self.rng.random() < 0.5
            if use_stoup:
                delta = (f"s{self._fresh()}", self.random_type(1, Kind.COMPUTATION))
                s = self.term_for(gamma, delta, a, self.fuel)
            else:
                delta = None
                s = self.term_for(gamma, None, a, self.fuel)
            if t is None or s is None:
                continue
            return tc.SubstSample(2, gamma, delta, x, a, t, s)
        raise RuntimeError("exhausted attempts while generating a substitution sample")
