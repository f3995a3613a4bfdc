"""Finite-dimensional algebras given by structure constants.

Products are held sparsely per basis pair; tensor squares fill their
tables lazily, which keeps the triple-tensor-product computations in
the verification suites affordable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .linalg import (Matrix, SpanBuilder,
                     solve_linear, Infeasible, DimensionMismatch)
from .scalars import ONE, ZERO, Scalar


class ParentMismatch(Exception):
    pass


class DegenerateProduct(Exception):
    pass


SparseVec = Dict[int, Scalar]


def vec_to_sparse(vec) -> SparseVec:
    return {i: v for i, v in enumerate(vec) if v}


def sparse_to_vec(s: SparseVec, n: int) -> list:
    out = [ZERO] * n
    for i, v in s.items():
        out[i] = v
    return out


def sparse_add_into(acc: SparseVec, s: SparseVec, coeff: Scalar = ONE) -> None:
    for i, v in s.items():
        t = acc.get(i, ZERO) + coeff * v
        if t:
            acc[i] = t
        elif i in acc:
            del acc[i]


class Algebra:
    """Associative algebra with basis e_0..e_{n-1} and products
    e_i e_j = sum_k m[i][j][k] e_k."""

    def __init__(self, dim: int, basis_labels: List[str]):
        self.dim = dim
        self.basis_labels = basis_labels
        self._table: Dict[Tuple[int, int], SparseVec] = {}
        self._factors: Optional[Tuple["Algebra", "Algebra"]] = None

    @staticmethod
    def from_structure(dim: int, basis_labels: Optional[List[str]], entries) -> "Algebra":
        """entries: iterable of (i, j, k, Scalar)."""
        a = Algebra(dim, basis_labels or [f"e{i}" for i in range(dim)])
        for i, j, k, v in entries:
            if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
                raise DimensionMismatch(f"structure index ({i},{j},{k}) out of range")
            if v:
                a._table.setdefault((i, j), {})[k] = v
        return a

    @staticmethod
    def tensor(a: "Algebra", b: "Algebra") -> "Algebra":
        """Tensor product with the row-major index (i, j) -> i*dim(b)+j."""
        t = Algebra(a.dim * b.dim,
                    [f"{la}(x){lb}" for la in a.basis_labels for lb in b.basis_labels])
        t._factors = (a, b)
        return t

    def mul_basis(self, i: int, j: int) -> SparseVec:
        got = self._table.get((i, j))
        if got is not None:
            return got
        if self._factors is None:
            return {}
        a, b = self._factors
        db = b.dim
        i1, i2 = divmod(i, db)
        j1, j2 = divmod(j, db)
        out: SparseVec = {}
        p = a.mul_basis(i1, j1)
        if p:
            q = b.mul_basis(i2, j2)
            for k1, v1 in p.items():
                for k2, v2 in q.items():
                    w = v1 * v2
                    if w:
                        out[k1 * db + k2] = w
        self._table[(i, j)] = out
        return out

    def unflatten(self, idx: int) -> Tuple[int, int]:
        if self._factors is None:
            raise ValueError("not a tensor algebra")
        return divmod(idx, self._factors[1].dim)

    def flatten(self, i: int, j: int) -> int:
        if self._factors is None:
            raise ValueError("not a tensor algebra")
        return i * self._factors[1].dim + j

    def structure_entries(self):
        """All nonzero (i, j, k, value) triples (forces lazy table)."""
        for i in range(self.dim):
            for j in range(self.dim):
                for k, v in self.mul_basis(i, j).items():
                    yield i, j, k, v

    def mul_sparse(self, x: SparseVec, y: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for i, xi in x.items():
            for j, yj in y.items():
                c = xi * yj
                if not c:
                    continue
                sparse_add_into(out, self.mul_basis(i, j), c)
        return out

    def element(self, coeffs) -> "Element":
        return Element(self, list(coeffs))

    def basis_element(self, i: int) -> "Element":
        c = [ZERO] * self.dim
        c[i] = ONE
        return Element(self, c)

    def zero(self) -> "Element":
        return Element(self, [ZERO] * self.dim)

    def mult_operator_left(self, x: "Element") -> Matrix:
        """Matrix of a -> x*a."""
        m = Matrix.zero(self.dim, self.dim)
        for i, xi in enumerate(x.coeffs):
            if not xi:
                continue
            for j in range(self.dim):
                for k, v in self.mul_basis(i, j).items():
                    m.data[k][j] = m.data[k][j] + xi * v
        return m

    def mult_operator_right(self, x: "Element") -> Matrix:
        """Matrix of a -> a*x."""
        m = Matrix.zero(self.dim, self.dim)
        for j, xj in enumerate(x.coeffs):
            if not xj:
                continue
            for i in range(self.dim):
                for k, v in self.mul_basis(i, j).items():
                    m.data[k][i] = m.data[k][i] + xj * v
        return m

    def left_mult_matrix_basis(self, i: int) -> Matrix:
        return self.mult_operator_left(self.basis_element(i))

    def right_mult_matrix_basis(self, j: int) -> Matrix:
        return self.mult_operator_right(self.basis_element(j))

    def opposite(self) -> "Algebra":
        out = Algebra(self.dim, list(self.basis_labels))
        out._table = {}
        for i in range(self.dim):
            for j in range(self.dim):
                p = self.mul_basis(j, i)
                if p:
                    out._table[(i, j)] = dict(p)
        return out

    def __repr__(self):
        return f"Algebra(dim={self.dim})"


@dataclass
class Element:
    parent: Algebra
    coeffs: list

    def __post_init__(self):
        if len(self.coeffs) != self.parent.dim:
            raise DimensionMismatch("coefficient vector length differs from algebra dimension")

    def __add__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.parent, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.parent, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def scale(self, s: Scalar) -> "Element":
        return Element(self.parent, [s * a for a in self.coeffs])

    def __mul__(self, other: "Element") -> "Element":
        self._same(other)
        out = self.parent.mul_sparse(vec_to_sparse(self.coeffs), vec_to_sparse(other.coeffs))
        return Element(self.parent, sparse_to_vec(out, self.parent.dim))

    def _same(self, other):
        if other.parent is not self.parent:
            raise ParentMismatch("elements from different algebras")

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def __eq__(self, other):
        return isinstance(other, Element) and other.parent is self.parent \
            and self.coeffs == other.coeffs

    def __repr__(self):
        terms = [f"{v}*{self.parent.basis_labels[i]}" for i, v in enumerate(self.coeffs) if v]
        return " + ".join(terms) if terms else "0"


def multiply(x: Element, y: Element) -> Element:
    return x * y


class Multiplier:
    """A pair (left action, right action) on an algebra: the concrete
    form of an element of the multiplier algebra M(A)."""

    __slots__ = ("parent", "left", "right")

    def __init__(self, parent: Algebra, left: Matrix, right: Matrix):
        self.parent = parent
        self.left = left
        self.right = right

    @staticmethod
    def unit(parent: Algebra) -> "Multiplier":
        ident = Matrix.identity(parent.dim)
        return Multiplier(parent, ident, ident)

    @staticmethod
    def embed(x: Element) -> "Multiplier":
        return Multiplier(x.parent, x.parent.mult_operator_left(x),
                          x.parent.mult_operator_right(x))

    def compatibility_failures(self, max_witnesses: int = 3) -> List[str]:
        """Violations of the three module laws, by name."""
        a = self.parent
        bad: List[str] = []
        lcol = lambda j: dict(self.left.col_sparse(j))
        rcol = lambda j: dict(self.right.col_sparse(j))
        for i in range(a.dim):
            li = lcol(i)
            ri = rcol(i)
            for j in range(a.dim):
                prod = a.mul_basis(i, j)
                # left(e_i e_j) = left(e_i) e_j
                lhs: SparseVec = {}
                for k, v in prod.items():
                    sparse_add_into(lhs, lcol(k), v)
                if lhs != a.mul_sparse(li, {j: ONE}):
                    bad.append(f"left law fails at ({i},{j})")
                # right(e_i e_j) = e_i right(e_j)
                lhs2: SparseVec = {}
                for k, v in prod.items():
                    sparse_add_into(lhs2, rcol(k), v)
                if lhs2 != a.mul_sparse({i: ONE}, rcol(j)):
                    bad.append(f"right law fails at ({i},{j})")
                # e_i left(e_j) = right(e_i) e_j
                if a.mul_sparse({i: ONE}, lcol(j)) != a.mul_sparse(ri, {j: ONE}):
                    bad.append(f"link law fails at ({i},{j})")
                if len(bad) >= max_witnesses:
                    return bad
        return bad

    def is_valid(self) -> bool:
        return not self.compatibility_failures()

    def __mul__(self, other: "Multiplier") -> "Multiplier":
        if other.parent is not self.parent:
            raise ParentMismatch("multipliers over different algebras")
        return Multiplier(self.parent, self.left * other.left, other.right * self.right)

    def __add__(self, other: "Multiplier") -> "Multiplier":
        return Multiplier(self.parent, self.left + other.left, self.right + other.right)

    def __sub__(self, other: "Multiplier") -> "Multiplier":
        return Multiplier(self.parent, self.left - other.left, self.right - other.right)

    def scale(self, s: Scalar) -> "Multiplier":
        return Multiplier(self.parent, self.left.scale(s), self.right.scale(s))

    def __eq__(self, other):
        return isinstance(other, Multiplier) and self.left == other.left \
            and self.right == other.right

    def apply_left(self, x: Element) -> Element:
        return Element(self.parent, self.left.apply(x.coeffs))

    def apply_right(self, x: Element) -> Element:
        return Element(self.parent, self.right.apply(x.coeffs))

    def as_element(self) -> Optional[Element]:
        """The element of A this multiplier is, if it is embedded."""
        a = self.parent
        n = a.dim
        constraints = []
        for j in range(n):
            col_l = self.left.col(j)
            col_r = self.right.col(j)
            for k in range(n):
                row = [a.mul_basis(i, j).get(k, ZERO) for i in range(n)]
                constraints.append((row, col_l[k]))
                row2 = [a.mul_basis(j, i).get(k, ZERO) for i in range(n)]
                constraints.append((row2, col_r[k]))
        try:
            sol, space = solve_linear(constraints, n)
        except Infeasible:
            return None
        if space.dim:
            return None  # only happens for degenerate products
        return Element(a, sol)

    def coords(self) -> list:
        """Flat coordinates (left columns then right columns), for spans."""
        out = []
        for j in range(self.left.cols):
            out.extend(self.left.col(j))
        for j in range(self.right.cols):
            out.extend(self.right.col(j))
        return out

    def __repr__(self):
        return f"Multiplier(dim={self.parent.dim})"


@dataclass
class AlgebraDiagnostics:
    associative: bool
    associativity_witness: Optional[Tuple[int, int, int]]
    nondegenerate: bool
    degeneracy_witness: Optional[str]
    idempotent: bool
    unit: Optional[Element]

    @property
    def ok(self) -> bool:
        return self.associative and self.nondegenerate and self.idempotent


def validate_algebra(a: Algebra) -> AlgebraDiagnostics:
    """Associativity, non-degeneracy, idempotency (A^2 = A), unit search."""
    assoc = True
    witness = None
    for i in range(a.dim):
        for j in range(a.dim):
            ij = a.mul_basis(i, j)
            for k in range(a.dim):
                lhs: SparseVec = {}
                for p, v in ij.items():
                    sparse_add_into(lhs, a.mul_basis(p, k), v)
                rhs: SparseVec = {}
                for q, v in a.mul_basis(j, k).items():
                    sparse_add_into(rhs, a.mul_basis(i, q), v)
                if lhs != rhs:
                    assoc = False
                    witness = (i, j, k)
                    break
            if not assoc:
                break
        if not assoc:
            break

    # x with x*A = 0: kernel of stacked right-multiplication operators
    right_rows = []
    left_rows = []
    for j in range(a.dim):
        rm = a.right_mult_matrix_basis(j)
        lm = a.left_mult_matrix_basis(j)
        right_rows.extend(rm.data)
        left_rows.extend(lm.data)
    nondeg = True
    deg_witness = None
    _, ker_r = _matrix_kernel(right_rows, a.dim)
    if ker_r:
        nondeg = False
        deg_witness = "nonzero x with x*A = 0"
    else:
        _, ker_l = _matrix_kernel(left_rows, a.dim)
        if ker_l:
            nondeg = False
            deg_witness = "nonzero x with A*x = 0"

    span = SpanBuilder(a.dim)
    for i in range(a.dim):
        for j in range(a.dim):
            prod = a.mul_basis(i, j)
            if prod:
                span.insert(sparse_to_vec(prod, a.dim))
        if span.dim == a.dim:
            break
    idem = span.dim == a.dim

    return AlgebraDiagnostics(assoc, witness, nondeg, deg_witness, idem,
                              find_unit_or_local_units(a))


def _matrix_kernel(rows, ncols):
    from .linalg import Echelon, Matrix as _M
    ech = Echelon(_M.from_rows(rows) if rows else _M.zero(0, ncols))
    return ech.rank, ech.nullspace()


def find_unit_or_local_units(a: Algebra) -> Optional[Element]:
    """The unit element when one exists.  For finite-dimensional algebras
    local units for the whole basis amount to a unit, so this single
    solve settles both questions."""
    constraints = []
    for j in range(a.dim):
        for k in range(a.dim):
            row = [a.mul_basis(i, j).get(k, ZERO) for i in range(a.dim)]
            constraints.append((row, ONE if j == k else ZERO))
            row2 = [a.mul_basis(j, i).get(k, ZERO) for i in range(a.dim)]
            constraints.append((row2, ONE if j == k else ZERO))
    try:
        sol, _ = solve_linear(constraints, a.dim)
    except Infeasible:
        return None
    return Element(a, sol)


def multiplier_algebra(a: Algebra) -> List[Multiplier]:
    """Basis of M(A) as (left, right) operator pairs.

    Unknowns are the two dim^2 matrices; the constraints are the three
    module laws on all basis pairs.
    """
    diags = validate_algebra(a)
    if not diags.nondegenerate:
        raise DegenerateProduct("multiplier algebra needs a non-degenerate product")
    n = a.dim
    nun = 2 * n * n  # left entries then right entries, column-major per matrix

    def lidx(r, c):
        return c * n + r

    def ridx(r, c):
        return n * n + c * n + r

    constraints = []
    for i in range(n):
        for j in range(n):
            prod = a.mul_basis(i, j)
            # L(e_i e_j) = L(e_i) e_j   rows over output coordinate k
            rm_j = a.right_mult_matrix_basis(j)
            for k in range(n):
                row = [ZERO] * nun
                for p, v in prod.items():
                    row[lidx(k, p)] = row[lidx(k, p)] + v
                for q in range(n):
                    c = rm_j.data[k][q]
                    if c:
                        row[lidx(q, i)] = row[lidx(q, i)] - c
                constraints.append((row, ZERO))
            # R(e_i e_j) = e_i R(e_j)
            lm_i = a.left_mult_matrix_basis(i)
            for k in range(n):
                row = [ZERO] * nun
                for p, v in prod.items():
                    row[ridx(k, p)] = row[ridx(k, p)] + v
                for q in range(n):
                    c = lm_i.data[k][q]
                    if c:
                        row[ridx(q, j)] = row[ridx(q, j)] - c
                constraints.append((row, ZERO))
            # e_i L(e_j) = R(e_i) e_j
            rm_j2 = a.right_mult_matrix_basis(j)
            for k in range(n):
                row = [ZERO] * nun
                for q in range(n):
                    c = lm_i.data[k][q]
                    if c:
                        row[lidx(q, j)] = row[lidx(q, j)] + c
                for q in range(n):
                    c = rm_j2.data[k][q]
                    if c:
                        row[ridx(q, i)] = row[ridx(q, i)] - c
                constraints.append((row, ZERO))
    _, space = solve_linear(constraints, nun)
    out = []
    for vec in space.basis:
        left = Matrix.zero(n, n)
        right = Matrix.zero(n, n)
        for c in range(n):
            for r in range(n):
                left.data[r][c] = vec[lidx(r, c)]
                right.data[r][c] = vec[ridx(r, c)]
        out.append(Multiplier(a, left, right))
    return out


def tensor_algebra(a: Algebra, b: Algebra) -> Algebra:
    return Algebra.tensor(a, b)


def opposite(a: Algebra) -> Algebra:
    return a.opposite()


def flip_map(dim: int) -> Matrix:
    """The flip sigma(e_i (x) e_j) = e_j (x) e_i on a dim^2 space."""
    m = Matrix.zero(dim * dim, dim * dim)
    for i in range(dim):
        for j in range(dim):
            m.data[j * dim + i][i * dim + j] = ONE
    return m


@dataclass
class StarStructure:
    """Conjugate-linear involution: (sum c_i e_i)* = sum conj(c_i) J e_i."""
    parent: Algebra
    star_matrix: Matrix

    def apply_vec(self, coeffs) -> list:
        return self.star_matrix.apply([c.conj() for c in coeffs])

    def apply(self, x: Element) -> Element:
        return Element(self.parent, self.apply_vec(x.coeffs))

    def tensor_square(self, aa: Algebra) -> "StarStructure":
        return StarStructure(aa, self.star_matrix.kron(self.star_matrix))


@dataclass
class StarDiagnostics:
    involutive: bool
    anti_multiplicative: bool
    witness: Optional[str] = None

    @property
    def ok(self):
        return self.involutive and self.anti_multiplicative


def validate_star(s: StarStructure, a: Algebra) -> StarDiagnostics:
    if s.star_matrix.rows != a.dim or s.star_matrix.cols != a.dim:
        raise DimensionMismatch("star matrix must be square of the algebra dimension")
    j = s.star_matrix
    invol = (j.conj() * j) == Matrix.identity(a.dim)
    anti = True
    witness = None
    for p in range(a.dim):
        sp = s.apply_vec([ONE if i == p else ZERO for i in range(a.dim)])
        for q in range(a.dim):
            sq = s.apply_vec([ONE if i == q else ZERO for i in range(a.dim)])
            prod = a.mul_basis(p, q)
            lhs = s.apply_vec(sparse_to_vec(prod, a.dim))
            rhs = a.mul_sparse(vec_to_sparse(sq), vec_to_sparse(sp))
            if vec_to_sparse(lhs) != rhs:
                anti = False
                witness = f"(e{p} e{q})* != e{q}* e{p}*"
                break
        if not anti:
            break
    return StarDiagnostics(invol, anti, witness)
