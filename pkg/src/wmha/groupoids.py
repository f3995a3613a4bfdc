"""Finite and lazily-infinite groupoids, and the two model algebras a
groupoid carries: pointwise functions (with the product-dual coproduct)
and the convolution algebra (with the diagonal coproduct).

Every model ships oracle witnesses (canonical idempotent, projection
idempotents, counit, antipode) that the engine's computed values must
reproduce exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .algebras import Algebra, Element
from .linalg import Matrix
from .scalars import ONE, ZERO


class UnknownPreset(Exception):
    pass


class BadParameter(Exception):
    pass


class WindowInvalid(Exception):
    pass


@dataclass
class FiniteGroupoid:
    morphisms: List[str]
    source: Dict[str, str]
    target: Dict[str, str]
    compose: Dict[Tuple[str, str], str]
    inverse: Dict[str, str]

    @property
    def units(self) -> List[str]:
        return [m for m in self.morphisms if self.source[m] == m and self.target[m] == m]

    def index(self) -> Dict[str, int]:
        return {m: i for i, m in enumerate(self.morphisms)}

    def composable(self, p: str, q: str) -> bool:
        return self.source[p] == self.target[q]


@dataclass
class GroupoidDiagnostics:
    violations: List[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_groupoid(g: FiniteGroupoid) -> GroupoidDiagnostics:
    bad: List[str] = []
    mset = set(g.morphisms)
    for p in g.morphisms:
        if g.source.get(p) not in mset or g.target.get(p) not in mset:
            bad.append(f"source/target of {p} missing")
            continue
        if g.inverse.get(p) not in mset:
            bad.append(f"inverse of {p} missing")
    if bad:
        return GroupoidDiagnostics(bad)

    units = set(g.units)
    for p in g.morphisms:
        if g.source[p] not in units:
            bad.append(f"source({p}) = {g.source[p]} is not a unit")
        if g.target[p] not in units:
            bad.append(f"target({p}) = {g.target[p]} is not a unit")
    for p in g.morphisms:
        for q in g.morphisms:
            defined = (p, q) in g.compose
            if defined != g.composable(p, q):
                bad.append(f"compose({p},{q}) defined iff source({p})=target({q}) fails")
            if defined:
                r = g.compose[(p, q)]
                if r not in mset:
                    bad.append(f"compose({p},{q}) = {r} not a morphism")
                    continue
                if g.source[r] != g.source[q] or g.target[r] != g.target[p]:
                    bad.append(f"source/target of composite {p}*{q} wrong")
    for p in g.morphisms:
        u, v = g.source[p], g.target[p]
        if (p, u) in g.compose and g.compose[(p, u)] != p:
            bad.append(f"{p}*source({p}) != {p}")
        if (v, p) in g.compose and g.compose[(v, p)] != p:
            bad.append(f"target({p})*{p} != {p}")
        ip = g.inverse[p]
        if g.compose.get((ip, p)) != u:
            bad.append(f"inverse({p})*{p} is not the unit at source({p})")
        if g.compose.get((p, ip)) != v:
            bad.append(f"{p}*inverse({p}) is not the unit at target({p})")
        if g.inverse[ip] != p:
            bad.append(f"inverse not involutive at {p}")
    for p in g.morphisms:
        for q in g.morphisms:
            if (p, q) not in g.compose:
                continue
            pq = g.compose[(p, q)]
            for r in g.morphisms:
                if (q, r) not in g.compose:
                    continue
                qr = g.compose[(q, r)]
                if g.compose.get((pq, r)) != g.compose.get((p, qr)):
                    bad.append(f"associativity fails at ({p},{q},{r})")
    return GroupoidDiagnostics(bad)


@dataclass
class LazyGroupoid:
    """Infinite groupoid presented through nested finite windows."""
    name: str
    window_fn: Callable[[int], FiniteGroupoid]
    units_infinite: bool = True

    def window(self, k: int) -> FiniteGroupoid:
        if k < 0:
            raise BadParameter("window size must be >= 0")
        return self.window_fn(k)


def pair_groupoid(n: int, offset: int = 0) -> FiniteGroupoid:
    pts = list(range(offset, offset + n))
    morphisms = [f"({i},{j})" for i in pts for j in pts]
    source = {f"({i},{j})": f"({j},{j})" for i in pts for j in pts}
    target = {f"({i},{j})": f"({i},{i})" for i in pts for j in pts}
    compose = {}
    for i in pts:
        for j in pts:
            for k in pts:
                compose[(f"({i},{j})", f"({j},{k})")] = f"({i},{k})"
    inverse = {f"({i},{j})": f"({j},{i})" for i in pts for j in pts}
    return FiniteGroupoid(morphisms, source, target, compose, inverse)


def cyclic_group_groupoid(n: int, unit_tag: Optional[str] = None) -> FiniteGroupoid:
    suffix = f"@{unit_tag}" if unit_tag is not None else ""
    morphisms = [f"g^{a}{suffix}" for a in range(n)]
    e = f"g^0{suffix}"
    source = {m: e for m in morphisms}
    target = {m: e for m in morphisms}
    compose = {(f"g^{a}{suffix}", f"g^{b}{suffix}"): f"g^{(a + b) % n}{suffix}"
               for a in range(n) for b in range(n)}
    inverse = {f"g^{a}{suffix}": f"g^{(-a) % n}{suffix}" for a in range(n)}
    return FiniteGroupoid(morphisms, source, target, compose, inverse)


def disjoint_union(parts: List[FiniteGroupoid]) -> FiniteGroupoid:
    morphisms: List[str] = []
    source: Dict[str, str] = {}
    target: Dict[str, str] = {}
    compose: Dict[Tuple[str, str], str] = {}
    inverse: Dict[str, str] = {}
    for g in parts:
        overlap = set(g.morphisms) & set(morphisms)
        if overlap:
            raise BadParameter(f"morphism ids collide in union: {sorted(overlap)[:3]}")
        morphisms.extend(g.morphisms)
        source.update(g.source)
        target.update(g.target)
        compose.update(g.compose)
        inverse.update(g.inverse)
    return FiniteGroupoid(morphisms, source, target, compose, inverse)


def cyclic_bundle(n: int, copies: int) -> FiniteGroupoid:
    return disjoint_union([cyclic_group_groupoid(n, unit_tag=f"u{c}") for c in range(copies)])


def preset(name: str):
    """Construct a named groupoid.  Finite presets are validated.

    Names: pair:N, group:cyclic:N, bundle:cyclic:N:K, union:<p>+<p>+...,
    pair:inf, bundle:cyclic:N:inf.
    """
    parts = name.split(":")
    try:
        if parts[0] == "pair" and len(parts) == 2:
            if parts[1] == "inf":
                lazy = LazyGroupoid("pair:inf", lambda k: pair_groupoid(k))
                _sanity_check_windows(lazy)
                return lazy
            n = int(parts[1])
            if n <= 0:
                raise BadParameter("pair:N needs N >= 1")
            g = pair_groupoid(n)
        elif parts[0] == "group" and len(parts) == 3 and parts[1] == "cyclic":
            n = int(parts[2])
            if n <= 0:
                raise BadParameter("group:cyclic:N needs N >= 1")
            g = cyclic_group_groupoid(n)
        elif parts[0] == "bundle" and len(parts) == 4 and parts[1] == "cyclic":
            n = int(parts[2])
            if n <= 0:
                raise BadParameter("bundle:cyclic:N:K needs N >= 1")
            if parts[3] == "inf":
                lazy = LazyGroupoid(f"bundle:cyclic:{n}:inf",
                                    lambda k: cyclic_bundle(n, k))
                _sanity_check_windows(lazy)
                return lazy
            copies = int(parts[3])
            if copies <= 0:
                raise BadParameter("bundle:cyclic:N:K needs K >= 1")
            g = cyclic_bundle(n, copies)
        elif parts[0] == "union":
            rest = name[len("union:"):]
            members = [preset(p) for p in rest.split("+")]
            if any(isinstance(m, LazyGroupoid) for m in members):
                raise BadParameter("union members must be finite presets")
            g = disjoint_union(members)
        else:
            raise UnknownPreset(name)
    except ValueError as exc:
        raise BadParameter(f"bad number in preset {name!r}") from exc
    diag = validate_groupoid(g)
    if not diag.ok:
        raise BadParameter(f"preset {name!r} fails groupoid axioms: {diag.violations[:2]}")
    return g


def _sanity_check_windows(lazy: LazyGroupoid, upto: int = 2) -> None:
    for k in range(1, upto + 1):
        diag = validate_groupoid(lazy.window(k))
        if not diag.ok:
            raise WindowInvalid(f"{lazy.name} window {k}: {diag.violations[0]}")
        small = set(lazy.window(k - 1).morphisms) if k > 1 else set()
        if not small <= set(lazy.window(k).morphisms):
            raise WindowInvalid(f"{lazy.name} windows {k - 1} and {k} are not nested")


@dataclass
class GroupoidModel:
    """A model algebra plus coproduct data and oracle witnesses."""
    groupoid: FiniteGroupoid
    kind: str                      # "function" | "convolution"
    algebra: Algebra
    t1: Matrix
    t2: Matrix
    t3: Matrix
    t4: Matrix
    star_matrix: Matrix
    oracle_counit: list
    oracle_s: Matrix
    oracle_e_left: Matrix
    oracle_e_right: Matrix
    oracle_g1: Matrix
    oracle_g2: Matrix
    oracle_unit: Optional[Element]


def _indicator_diag(g: FiniteGroupoid, pred) -> Matrix:
    idx = g.index()
    n = len(g.morphisms)
    m = Matrix.zero(n * n, n * n)
    for p in g.morphisms:
        for q in g.morphisms:
            if pred(p, q):
                k = idx[p] * n + idx[q]
                m.data[k][k] = ONE
    return m


def function_algebra(g: FiniteGroupoid) -> GroupoidModel:
    """Pointwise functions on the groupoid; the coproduct is dual to
    composition: it sends f to (p, q) -> f(pq)."""
    idx = g.index()
    n = len(g.morphisms)
    alg = Algebra.from_structure(
        n, list(g.morphisms),
        [(i, i, i, ONE) for i in range(n)])

    t1 = Matrix.zero(n * n, n * n)
    t2 = Matrix.zero(n * n, n * n)
    for p in g.morphisms:
        for q in g.morphisms:
            col = idx[p] * n + idx[q]
            # T1 column at delta_p (x) delta_q: delta_{p q^-1} (x) delta_q
            if g.source[p] == g.source[q]:
                r = g.compose[(p, g.inverse[q])]
                t1.data[idx[r] * n + idx[q]][col] = ONE
            # T2 column: delta_p (x) delta_{p^-1 q}
            if g.target[p] == g.target[q]:
                s = g.compose[(g.inverse[p], q)]
                t2.data[idx[p] * n + idx[s]][col] = ONE
    # pointwise algebra is abelian, so the flipped-side maps coincide
    t3, t4 = t1, t2

    units = set(g.units)
    counit = [ONE if m in units else ZERO for m in g.morphisms]
    s_mat = Matrix.permutation([idx[g.inverse[m]] for m in g.morphisms])
    e_diag = _indicator_diag(g, lambda p, q: g.source[p] == g.target[q])
    g1 = _indicator_diag(g, lambda p, q: g.source[p] == g.source[q])
    g2 = _indicator_diag(g, lambda p, q: g.target[p] == g.target[q])
    unit = Element(alg, [ONE] * n)
    return GroupoidModel(g, "function", alg, t1, t2, t3, t4,
                         Matrix.identity(n), counit, s_mat,
                         e_diag, e_diag, g1, g2, unit)


def convolution_algebra(g: FiniteGroupoid) -> GroupoidModel:
    """The groupoid algebra: basis lambda_p, product by composition (or
    zero), diagonal coproduct lambda_p -> lambda_p (x) lambda_p."""
    idx = g.index()
    n = len(g.morphisms)
    entries = []
    for (p, q), r in g.compose.items():
        entries.append((idx[p], idx[q], idx[r], ONE))
    alg = Algebra.from_structure(n, [f"L[{m}]" for m in g.morphisms], entries)

    t1 = Matrix.zero(n * n, n * n)
    t2 = Matrix.zero(n * n, n * n)
    t3 = Matrix.zero(n * n, n * n)
    t4 = Matrix.zero(n * n, n * n)
    for p in g.morphisms:
        for q in g.morphisms:
            col = idx[p] * n + idx[q]
            if g.composable(p, q):
                pq = g.compose[(p, q)]
                t1.data[idx[p] * n + idx[pq]][col] = ONE   # lam_p (x) lam_p lam_q
                t2.data[idx[pq] * n + idx[q]][col] = ONE   # lam_p lam_q (x) lam_q
            if g.composable(q, p):
                qp = g.compose[(q, p)]
                t3.data[idx[p] * n + idx[qp]][col] = ONE   # lam_p (x) lam_q lam_p
                t4.data[idx[qp] * n + idx[q]][col] = ONE   # lam_q lam_p (x) lam_q
    counit = [ONE] * n
    s_mat = Matrix.permutation([idx[g.inverse[m]] for m in g.morphisms])
    e_left = _indicator_diag(g, lambda p, q: g.target[p] == g.target[q])
    e_right = _indicator_diag(g, lambda p, q: g.source[p] == g.source[q])
    g_both = _indicator_diag(g, lambda p, q: g.source[p] == g.target[q])
    unit_coeffs = [ZERO] * n
    for u in g.units:
        unit_coeffs[idx[u]] = ONE
    unit = Element(alg, unit_coeffs)
    return GroupoidModel(g, "convolution", alg, t1, t2, t3, t4,
                         s_mat, counit, s_mat,
                         e_left, e_right, g_both, g_both, unit)


def build_model(g: FiniteGroupoid, kind: str) -> GroupoidModel:
    if kind == "function":
        return function_algebra(g)
    if kind == "convolution":
        return convolution_algebra(g)
    raise BadParameter(f"unknown model kind {kind!r}")


@dataclass
class PairingDiagnostics:
    product_vs_coproduct: bool
    coproduct_vs_product: bool
    antipode_compatible: bool
    witness: Optional[str] = None

    @property
    def ok(self):
        return self.product_vs_coproduct and self.coproduct_vs_product \
            and self.antipode_compatible


def check_duality_pairing(g: FiniteGroupoid) -> PairingDiagnostics:
    """With <delta_p, lam_q> = [p = q], the two models pair product against
    coproduct (both ways) and antipode against antipode."""
    fun = function_algebra(g)
    conv = convolution_algebra(g)
    idx = g.index()
    n = len(g.morphisms)

    # <f g, lam_p> = <f (x) g, coproduct(lam_p)>: coproduct is diagonal
    ok1 = True
    w = None
    for a in g.morphisms:
        for b in g.morphisms:
            prod = fun.algebra.mul_basis(idx[a], idx[b])  # pointwise
            for p in g.morphisms:
                lhs = prod.get(idx[p], ZERO)
                rhs = ONE if (a == p and b == p) else ZERO
                if lhs != rhs:
                    ok1, w = False, f"product/coproduct pairing fails at ({a},{b},{p})"
                    break
            if not ok1:
                break
        if not ok1:
            break

    # <coproduct(delta_r), lam_p (x) lam_q> = <delta_r, lam_p lam_q>
    ok2 = True
    for r in g.morphisms:
        for p in g.morphisms:
            for q in g.morphisms:
                # coefficient of delta_r at (p, q), read through T1 against q
                col = fun.t1.col_sparse(idx[r] * n + idx[q])
                lhs = ZERO
                for row, v in col:
                    if row == idx[p] * n + idx[q]:
                        lhs = v
                        break
                conv_prod = conv.algebra.mul_basis(idx[p], idx[q])
                rhs = conv_prod.get(idx[r], ZERO)
                if lhs != rhs:
                    ok2 = False
                    w = w or f"coproduct/product pairing fails at ({r},{p},{q})"
                    break
            if not ok2:
                break
        if not ok2:
            break

    # <S f, lam_p> = <f, S lam_p>
    ok3 = True
    for r in g.morphisms:
        for p in g.morphisms:
            lhs = ONE if g.inverse[r] == p else ZERO
            rhs = ONE if r == g.inverse[p] else ZERO
            if lhs != rhs:
                ok3 = False
                w = w or f"antipode pairing fails at ({r},{p})"
                break
        if not ok3:
            break
    return PairingDiagnostics(ok1, ok2, ok3, w)


def local_unit_for(model: GroupoidModel, members: List[int]) -> Element:
    """A local unit for the given basis indices.

    Function model: the indicator of every morphism whose source and
    target stay among the touched units.  Convolution model: the sum of
    lambda_e over the touched units.
    """
    g = model.groupoid
    idx = g.index()
    touched = set()
    for i in members:
        m = g.morphisms[i]
        touched.add(g.source[m])
        touched.add(g.target[m])
    coeffs = [ZERO] * model.algebra.dim
    if model.kind == "function":
        for m in g.morphisms:
            if g.source[m] in touched and g.target[m] in touched:
                coeffs[idx[m]] = ONE
    else:
        for u in touched:
            coeffs[idx[u]] = ONE
    return Element(model.algebra, coeffs)
