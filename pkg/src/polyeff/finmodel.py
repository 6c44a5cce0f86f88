"""Finite semantic substrate: sets, monads, algebras and relations.

Three monads are supported, each presented through operation tables on
finite carriers rather than abstract structure maps:

* ``identity``   — algebras are bare sets, every map is a homomorphism;
* ``exception``  — T A = A + E; algebras are E-pointed sets (one
  distinguished ``raise`` element per exception, no laws);
* ``powerset``   — T A = nonempty subsets of A; algebras are
  semilattices (idempotent commutative associative ``or``).

Carrier elements are canonically 0..n-1.  For the exception monad the
first |A| elements of T A are the values and the last |E| the raised
exceptions; for the powerset monad element ``i`` of T A is the subset
with bitmask ``i + 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Optional, Sequence


class ModelError(Exception):
    pass


@dataclass(frozen=True)
class FinSet:
    size: int
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.size < 0:
            raise ModelError("negative carrier size")
        if self.labels is not None and len(self.labels) != self.size:
            raise ModelError("label list does not match carrier size")

    def label(self, i: int) -> str:
        if self.labels is not None:
            return self.labels[i]
        return str(i)


@dataclass(frozen=True)
class Bound:
    max_carrier: int

    def __post_init__(self):
        if self.max_carrier < 0:
            raise ModelError("bound must be nonnegative")


# ---------------------------------------------------------------------------
# monads


@dataclass(frozen=True)
class MonadSpec:
    key: str  # "identity" | "exception" | "powerset"
    exceptions: tuple[str, ...] = ()

    def __post_init__(self):
        if self.key not in ("identity", "exception", "powerset"):
            raise ModelError(f"unknown monad {self.key!r}")
        if self.key != "exception" and self.exceptions:
            raise ModelError(f"{self.key} monad takes no exception set")

    @property
    def n_exc(self) -> int:
        return len(self.exceptions)

    def apply(self, a: FinSet) -> FinSet:
        if self.key == "identity":
            return a
        if self.key == "exception":
            labels = tuple(a.label(i) for i in range(a.size)) + tuple(
                f"raise:{e}" for e in self.exceptions
            )
            return FinSet(a.size + self.n_exc, labels)
        n = (1 << a.size) - 1
        labels = tuple(
            "{" + ",".join(a.label(i) for i in range(a.size) if (m + 1) >> i & 1) + "}"
            for m in range(n)
        )
        return FinSet(n, labels)

    def unit(self, a: FinSet) -> tuple[int, ...]:
        if self.key == "identity":
            return tuple(range(a.size))
        if self.key == "exception":
            return tuple(range(a.size))
        return tuple((1 << i) - 1 for i in range(a.size))

    def extend(self, f: Sequence[int], a: FinSet, b: FinSet) -> tuple[int, ...]:
        """Lift ``f : A -> T B`` to ``f+ : T A -> T B``."""
        if len(f) != a.size:
            raise ModelError("table does not cover the domain")
        if self.key == "identity":
            return tuple(f)
        if self.key == "exception":
            out = list(f)
            for e in range(self.n_exc):
                out.append(b.size + e)
            return tuple(out)
        out = []
        for m in range(1, (1 << a.size)):
            mask = 0
            for i in range(a.size):
                if m >> i & 1:
                    mask |= f[i] + 1
            out.append(mask - 1)
        return tuple(out)

    def tmap(self, f: Sequence[int], a: FinSet, b: FinSet) -> tuple[int, ...]:
        """Functor action: T f = (unit . f)+."""
        eta = self.unit(b)
        return self.extend([eta[f[i]] for i in range(a.size)], a, b)


# ---------------------------------------------------------------------------
# algebras


@dataclass(frozen=True)
class Alg:
    monad: MonadSpec
    carrier: FinSet
    raise_points: tuple[int, ...] = ()
    or_table: tuple[tuple[int, ...], ...] = ()
    em_map: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        n = self.carrier.size
        if self.monad.key == "exception":
            if len(self.raise_points) != self.monad.n_exc:
                raise ModelError("one distinguished point per exception required")
            if any(not 0 <= p < n for p in self.raise_points):
                raise ModelError("distinguished point outside carrier")
        elif self.raise_points:
            raise ModelError("raise points only make sense for the exception monad")
        if self.monad.key == "powerset":
            if len(self.or_table) != n or any(len(r) != n for r in self.or_table):
                raise ModelError("or table must be square on the carrier")
        elif self.or_table:
            raise ModelError("or table only makes sense for the powerset monad")

    def op_or(self, x: int, y: int) -> int:
        return self.or_table[x][y]


def semilattice_laws_hold(table: Sequence[Sequence[int]]) -> bool:
    n = len(table)
    for x in range(n):
        if table[x][x] != x:
            return False
        for y in range(n):
            if table[x][y] != table[y][x]:
                return False
            for z in range(n):
                if table[table[x][y]][z] != table[x][table[y][z]]:
                    return False
    return True


def check_algebra(alg: Alg) -> None:
    """Validate the equational laws of the algebra's operation tables."""
    if alg.monad.key == "powerset" and not semilattice_laws_hold(alg.or_table):
        raise ModelError("or table violates the semilattice laws")
    if alg.em_map is not None:
        check_em_map(alg)


def em_map_of(alg: Alg) -> tuple[int, ...]:
    """Derive the structure map T(carrier) -> carrier from the operation tables."""
    m, n = alg.monad, alg.carrier.size
    if m.key == "identity":
        return tuple(range(n))
    if m.key == "exception":
        return tuple(range(n)) + tuple(alg.raise_points)
    out = []
    for mask_minus in range((1 << n) - 1):
        mask = mask_minus + 1
        elems = [i for i in range(n) if mask >> i & 1]
        acc = elems[0]
        for e in elems[1:]:
            acc = alg.op_or(acc, e)
        out.append(acc)
    return tuple(out)


def check_em_map(alg: Alg) -> None:
    """The optional structure map must agree with the tables and the monad.

    Checks xi . unit = id and the multiplication square xi . T(xi) = xi . mu,
    both exhaustively on the (finite) relevant carriers.
    """
    xi = alg.em_map
    assert xi is not None
    m, a = alg.monad, alg.carrier
    derived = em_map_of(alg)
    if tuple(xi) != derived:
        raise ModelError("structure map disagrees with the operation tables")
    eta = m.unit(a)
    for i in range(a.size):
        if xi[eta[i]] != i:
            raise ModelError("structure map does not retract the unit")
    ta = m.apply(a)
    t_xi = m.tmap(xi, ta, a)
    mu = m.extend(tuple(range(ta.size)), ta, a)  # join: extend of the identity
    tta = m.apply(ta)
    for i in range(tta.size):
        if xi[t_xi[i]] != xi[mu[i]]:
            raise ModelError("structure map fails the multiplication square")


def enumerate_sets(b: Bound) -> list[FinSet]:
    """One canonical set per cardinality 0..max."""
    return [FinSet(n) for n in range(b.max_carrier + 1)]


def enumerate_algebras(m: MonadSpec, b: Bound) -> list[Alg]:
    """All algebra structures on each enumerated carrier, by literal tables."""
    out: list[Alg] = []
    for n in range(b.max_carrier + 1):
        carrier = FinSet(n)
        if m.key == "identity":
            out.append(Alg(m, carrier))
            continue
        if m.key == "exception":
            if n == 0 and m.n_exc > 0:
                continue  # no choice of distinguished points
            for pts in product(range(n), repeat=m.n_exc):
                out.append(Alg(m, carrier, raise_points=pts))
            continue
        # powerset: enumerate symmetric idempotent tables, filter associativity
        cells = [(x, y) for x in range(n) for y in range(x + 1, n)]
        for choice in product(range(n), repeat=len(cells)):
            table = [[x if x == y else -1 for y in range(n)] for x in range(n)]
            for (x, y), v in zip(cells, choice):
                table[x][y] = table[y][x] = v
            tbl = tuple(tuple(r) for r in table)
            if semilattice_laws_hold(tbl):
                out.append(Alg(m, carrier, or_table=tbl))
    return out


def free_algebra(m: MonadSpec, a: FinSet) -> tuple[Alg, tuple[int, ...]]:
    """The algebra on T A together with the unit table A -> T A."""
    ta = m.apply(a)
    if m.key == "identity":
        return Alg(m, ta), m.unit(a)
    if m.key == "exception":
        pts = tuple(a.size + e for e in range(m.n_exc))
        return Alg(m, ta, raise_points=pts), m.unit(a)
    n = ta.size
    table = tuple(
        tuple((((x + 1) | (y + 1)) - 1) for y in range(n)) for x in range(n)
    )
    return Alg(m, ta, or_table=table), m.unit(a)


def is_homomorphism(table: Sequence[int], dom: Alg, cod: Alg) -> bool:
    """Does the total map preserve every structure operation?"""
    n = dom.carrier.size
    if len(table) != n or any(not 0 <= v < cod.carrier.size for v in table):
        return False
    if dom.monad.key == "exception":
        for p, q in zip(dom.raise_points, cod.raise_points):
            if table[p] != q:
                return False
    if dom.monad.key == "powerset":
        for x in range(n):
            for y in range(x, n):
                if table[dom.op_or(x, y)] != cod.op_or(table[x], table[y]):
                    return False
    return True


def enumerate_homs(dom: Alg, cod: Alg, cap: int = 1_000_000) -> list[tuple[int, ...]]:
    """All homomorphism tables dom -> cod, in lexicographic order."""
    n, mcod = dom.carrier.size, cod.carrier.size
    if mcod == 0:
        return [] if n > 0 else [()]
    if mcod ** n > cap:
        raise ModelError(f"hom space too large: {mcod}^{n}")
    out = []
    for tbl in product(range(mcod), repeat=n):
        if is_homomorphism(tbl, dom, cod):
            out.append(tbl)
    return out


def carries_subalgebra(subset: Iterable[int], alg: Alg) -> bool:
    """Is the subset closed under all structure operations?"""
    s = set(subset)
    if not all(0 <= x < alg.carrier.size for x in s):
        raise ModelError("subset escapes the carrier")
    if alg.monad.key == "exception":
        if not set(alg.raise_points) <= s:
            return False
    if alg.monad.key == "powerset":
        for x in s:
            for y in s:
                if alg.op_or(x, y) not in s:
                    return False
    return True


# ---------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class Rel:
    left: FinSet
    right: FinSet
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        for x, y in self.pairs:
            if not (0 <= x < self.left.size and 0 <= y < self.right.size):
                raise ModelError(f"pair {(x, y)} escapes {self.left.size}x{self.right.size}")


def diagonal(a: FinSet) -> Rel:
    return Rel(a, a, frozenset((i, i) for i in range(a.size)))


def opposite(r: Rel) -> Rel:
    return Rel(r.right, r.left, frozenset((y, x) for x, y in r.pairs))


def preimage(f: Sequence[int], g: Sequence[int], r: Rel) -> Rel:
    """(f,g)^-1 R = { (x,y) | (f x, g y) in R }."""
    pairs = frozenset(
        (x, y)
        for x in range(len(f))
        for y in range(len(g))
        if (f[x], g[y]) in r.pairs
    )
    return Rel(FinSet(len(f)), FinSet(len(g)), pairs)


def graph_rel(f: Sequence[int], a: FinSet, b: FinSet) -> Rel:
    """Graph f = (f, id)^-1 of the diagonal."""
    return preimage(f, tuple(range(b.size)), diagonal(b))


def product_alg(a: Alg, b: Alg) -> Alg:
    """Componentwise structure on the product carrier; index = x*|B| + y."""
    if a.monad != b.monad:
        raise ModelError("algebras over different monads")
    m = a.monad
    na, nb = a.carrier.size, b.carrier.size
    carrier = FinSet(na * nb)
    if m.key == "identity":
        return Alg(m, carrier)
    if m.key == "exception":
        pts = tuple(p * nb + q for p, q in zip(a.raise_points, b.raise_points))
        return Alg(m, carrier, raise_points=pts)
    table = tuple(
        tuple(
            a.op_or(x // nb, y // nb) * nb + b.op_or(x % nb, y % nb)
            for y in range(na * nb)
        )
        for x in range(na * nb)
    )
    return Alg(m, carrier, or_table=table)


def rel_carries_subalgebra(r: Rel, a: Alg, b: Alg) -> bool:
    nb = b.carrier.size
    return carries_subalgebra({x * nb + y for x, y in r.pairs}, product_alg(a, b))


def admissible_closure(r: Rel, a: Alg, b: Alg) -> Rel:
    """Smallest relation containing r closed under the product structure."""
    m = a.monad
    pairs = set(r.pairs)
    if m.key == "exception":
        for p, q in zip(a.raise_points, b.raise_points):
            pairs.add((p, q))
    if m.key == "powerset":
        changed = True
        while changed:
            changed = False
            snapshot = list(pairs)
            for x1, y1 in snapshot:
                for x2, y2 in snapshot:
                    p = (a.op_or(x1, x2), b.op_or(y1, y2))
                    if p not in pairs:
                        pairs.add(p)
                        changed = True
    return Rel(r.left, r.right, frozenset(pairs))


def enumerate_set_rels(a: FinSet, b: FinSet, cap_bits: int = 16) -> list[frozenset]:
    """Every relation between two sets, as pair sets, in a stable order."""
    cells = [(x, y) for x in range(a.size) for y in range(b.size)]
    if len(cells) > cap_bits:
        raise ModelError(f"relation space too large: 2^{len(cells)}")
    out = []
    for mask in range(1 << len(cells)):
        out.append(frozenset(c for i, c in enumerate(cells) if mask >> i & 1))
    return out


def enumerate_alg_rels(a: Alg, b: Alg, cap_bits: int = 16) -> list[frozenset]:
    """Relations whose pair set carries a subalgebra of the product."""
    cells = [(x, y) for x in range(a.carrier.size) for y in range(b.carrier.size)]
    if len(cells) > cap_bits:
        raise ModelError(f"relation space too large: 2^{len(cells)}")
    prod = product_alg(a, b)
    nb = b.carrier.size
    out = []
    for mask in range(1 << len(cells)):
        pairs = frozenset(c for i, c in enumerate(cells) if mask >> i & 1)
        if carries_subalgebra({x * nb + y for x, y in pairs}, prod):
            out.append(pairs)
    return out


# ---------------------------------------------------------------------------
# monad law checking


@dataclass
class LawReport:
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _all_tables(dom: int, cod: int):
    return product(range(cod), repeat=dom)


def check_monad_laws(m: MonadSpec, max_size: int, direct_pair_cap: int = 20_000) -> LawReport:
    """Exhaustive Kleisli-law check on all sets up to ``max_size``.

    * unit law (left): extend(unit) = id, once per set;
    * unit law (right): extend(f) . unit = f, for every table f;
    * associativity: via an equivalent decomposition everywhere (every
      extension is a structure homomorphism, and the unit image generates
      T A, which pins extensions uniquely, so composed extensions agree on
      all of T A), cross-checked directly over all (f, g) pairs while the
      product of table spaces stays below ``direct_pair_cap``.
    """
    rep = LawReport()
    sets = [FinSet(n) for n in range(max_size + 1)]

    for a in sets:
        ta = m.apply(a)
        if tuple(m.extend(m.unit(a), a, a)) != tuple(range(ta.size)):
            rep.failures.append(f"extend(unit) != id at |A|={a.size}")
        rep.checked += 1
        if not _unit_image_generates(m, a):
            rep.failures.append(f"unit image does not generate T A at |A|={a.size}")
        rep.checked += 1

    for a in sets:
        for b in sets:
            tb = m.apply(b)
            if tb.size == 0 and a.size > 0:
                continue
            if m.key == "powerset" and a.size >= 4 and tb.size >= 8:
                rep.checked += _powerset_sweep(m, a, b, rep)
                continue
            eta_a = m.unit(a)
            fa, _ = free_algebra(m, a)
            fb, _ = free_algebra(m, b)
            for f in _all_tables(a.size, tb.size):
                fext = m.extend(f, a, b)
                for i in range(a.size):
                    if fext[eta_a[i]] != f[i]:
                        rep.failures.append(f"extend(f).unit != f at |A|={a.size},|B|={b.size}")
                        break
                if not is_homomorphism(fext, fa, fb):
                    rep.failures.append(
                        f"extension not a homomorphism at |A|={a.size},|B|={b.size}"
                    )
                rep.checked += 1

    for a in sets:
        for b in sets:
            for c in sets:
                tb, tc = m.apply(b), m.apply(c)
                if (tb.size == 0 and a.size > 0) or (tc.size == 0 and b.size > 0):
                    continue
                nf = tb.size ** a.size
                ng = tc.size ** b.size
                if nf * ng > direct_pair_cap:
                    continue  # covered by the decomposition above
                gexts = [m.extend(g, b, c) for g in _all_tables(b.size, tc.size)]
                for f in _all_tables(a.size, tb.size):
                    fext = m.extend(f, a, b)
                    for gext in gexts:
                        lhs = m.extend([gext[f[i]] for i in range(a.size)], a, c)
                        rhs = tuple(gext[fext[i]] for i in range(len(fext)))
                        if tuple(lhs) != rhs:
                            rep.failures.append(
                                f"associativity fails at |A|={a.size},|B|={b.size},|C|={c.size}"
                            )
                        rep.checked += 1
    return rep


def _unit_image_generates(m: MonadSpec, a: FinSet) -> bool:
    """T A must be generated by the unit image under the free structure ops."""
    fa, eta = free_algebra(m, a)
    reached = set(eta)
    if m.key == "exception":
        reached |= set(fa.raise_points)
    if m.key == "powerset":
        changed = True
        while changed:
            changed = False
            for x in list(reached):
                for y in list(reached):
                    z = fa.op_or(x, y)
                    if z not in reached:
                        reached |= {z}
                        changed = True
    return reached == set(range(fa.carrier.size))


def _powerset_sweep(m: MonadSpec, a: FinSet, b: FinSet, rep: LawReport) -> int:
    """Vectorized unit-law and homomorphism sweep over every f : A -> T B."""
    import numpy as np

    tb = m.apply(b)
    na, ntb = a.size, tb.size
    fs = np.array(list(product(range(ntb), repeat=na)), dtype=np.int64)  # (nf, na)
    masks = fs + 1
    # extension tables as masks, one column per element of T A
    ext = np.empty((fs.shape[0], (1 << na) - 1), dtype=np.int64)
    for s in range((1 << na) - 1):
        bits = [i for i in range(na) if (s + 1) >> i & 1]
        acc = masks[:, bits[0]].copy()
        for i in bits[1:]:
            acc |= masks[:, i]
        ext[:, s] = acc
    # unit law: extension at singleton {i} equals f(i)
    for i in range(na):
        if not np.array_equal(ext[:, (1 << i) - 1], masks[:, i]):
            rep.failures.append(f"extend(f).unit != f at |A|={na},|B|={b.size}")
            break
    # homomorphism: extension preserves unions
    for x in range((1 << na) - 1):
        for y in range(x, (1 << na) - 1):
            z = ((x + 1) | (y + 1)) - 1
            if not np.array_equal(ext[:, z], ext[:, x] | ext[:, y]):
                rep.failures.append(f"extension not union-preserving at |A|={na},|B|={b.size}")
                return fs.shape[0]
    return fs.shape[0]


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ModelConfig:
    monad: str = "exception"
    exceptions: tuple[str, ...] = ("e",)
    bound: int = 2
    include_free_algebras: bool = False

    def monad_spec(self) -> MonadSpec:
        exc = self.exceptions if self.monad == "exception" else ()
        return MonadSpec(self.monad, tuple(exc))

    def to_json(self) -> dict:
        return {
            "monad": self.monad,
            "E": list(self.exceptions),
            "bound": self.bound,
            "include-free-algebras": self.include_free_algebras,
        }

    @staticmethod
    def from_json(data) -> "ModelConfig":
        if isinstance(data, str):
            data = json.loads(data)
        return ModelConfig(
            monad=data.get("monad", "exception"),
            exceptions=tuple(data.get("E", ["e"])),
            bound=int(data.get("bound", 2)),
            include_free_algebras=bool(data.get("include-free-algebras", False)),
        )
