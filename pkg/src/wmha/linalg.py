"""Exact linear algebra over Q(i): ranks, kernels, solvers, subspaces,
and generalized inverses of linear maps with prescribed range and
kernel projections.

Everything is dense and exact.  Pivoting rules are fixed (first nonzero
entry in scan order) so repeated runs produce identical witnesses.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .scalars import ONE, ZERO, Scalar


class DimensionMismatch(Exception):
    pass


class Infeasible(Exception):
    """A linear constraint system has no solution."""


class BadProjections(Exception):
    """The projection pair handed to generalized_inverse is unusable;
    the message names the violated condition."""


class Matrix:
    """Dense matrix of Scalars.  Treated as immutable once built."""

    __slots__ = ("rows", "cols", "data", "_colcache")

    def __init__(self, rows: int, cols: int, data):
        self.rows = rows
        self.cols = cols
        self.data = data  # list of row lists
        self._colcache = None

    @staticmethod
    def zero(rows: int, cols: int) -> "Matrix":
        return Matrix(rows, cols, [[ZERO] * cols for _ in range(rows)])

    @staticmethod
    def identity(n: int) -> "Matrix":
        m = Matrix.zero(n, n)
        for i in range(n):
            m.data[i][i] = ONE
        return m

    @staticmethod
    def from_rows(rows: Sequence[Sequence[Scalar]]) -> "Matrix":
        rows = [list(r) for r in rows]
        return Matrix(len(rows), len(rows[0]) if rows else 0, rows)

    @staticmethod
    def from_cols(cols: Sequence[Sequence[Scalar]], rows: Optional[int] = None) -> "Matrix":
        if not cols:
            return Matrix.zero(rows or 0, 0)
        n = len(cols[0])
        m = Matrix.zero(n, len(cols))
        for j, c in enumerate(cols):
            for i, v in enumerate(c):
                m.data[i][j] = v
        return m

    @staticmethod
    def from_sparse(rows: int, cols: int, entries: Iterable) -> "Matrix":
        """entries: iterable of (i, j, Scalar)."""
        m = Matrix.zero(rows, cols)
        for i, j, v in entries:
            m.data[i][j] = v
        return m

    @staticmethod
    def permutation(perm: Sequence[int]) -> "Matrix":
        """Matrix sending basis vector j to basis vector perm[j]."""
        n = len(perm)
        m = Matrix.zero(n, n)
        for j, i in enumerate(perm):
            m.data[i][j] = ONE
        return m

    def col(self, j: int) -> list:
        return [self.data[i][j] for i in range(self.rows)]

    def col_sparse(self, j: int) -> list:
        if self._colcache is None:
            self._colcache = [None] * self.cols
        cached = self._colcache[j]
        if cached is None:
            cached = [(i, row[j]) for i, row in enumerate(self.data)
                      if row[j] is not ZERO and row[j]]
            self._colcache[j] = cached
        return cached

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def conj(self) -> "Matrix":
        return Matrix(self.rows, self.cols,
                      [[v.conj() for v in row] for row in self.data])

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) \
            and self.data == other.data

    def __hash__(self):
        raise TypeError("Matrix is not hashable")

    def __add__(self, other):
        self._check_shape(other)
        return Matrix(self.rows, self.cols,
                      [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)])

    def __sub__(self, other):
        self._check_shape(other)
        return Matrix(self.rows, self.cols,
                      [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)])

    def _check_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch(f"{self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def scale(self, s: Scalar) -> "Matrix":
        return Matrix(self.rows, self.cols, [[s * v for v in row] for row in self.data])

    def __mul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.rows}x{self.cols} * {other.rows}x{other.cols}")
        out = Matrix.zero(self.rows, other.cols)
        odata = out.data
        for i in range(self.rows):
            arow = self.data[i]
            orow = odata[i]
            for k in range(self.cols):
                a = arow[k]
                if a is ZERO or not a:
                    continue
                brow = other.data[k]
                for j in range(other.cols):
                    b = brow[j]
                    if b is not ZERO and b:
                        orow[j] = orow[j] + a * b
        return out

    def apply(self, vec: Sequence[Scalar]) -> list:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector length {len(vec)} vs {self.cols} columns")
        out = [ZERO] * self.rows
        for j, x in enumerate(vec):
            if x is ZERO or not x:
                continue
            for i, v in self.col_sparse(j):
                out[i] = out[i] + v * x
        return out

    def apply_sparse(self, vec: dict) -> dict:
        out: dict = {}
        for j, x in vec.items():
            if not x:
                continue
            for i, v in self.col_sparse(j):
                s = out.get(i, ZERO) + v * x
                if s:
                    out[i] = s
                elif i in out:
                    del out[i]
        return out

    def is_zero(self) -> bool:
        return all(v is ZERO or not v for row in self.data for v in row)

    def kron(self, other: "Matrix") -> "Matrix":
        """Tensor (Kronecker) product, row-major index convention."""
        out = Matrix.zero(self.rows * other.rows, self.cols * other.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self.data[i][j]
                if not a:
                    continue
                for k in range(other.rows):
                    for l in range(other.cols):
                        b = other.data[k][l]
                        if b:
                            out.data[i * other.rows + k][j * other.cols + l] = a * b
        return out

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols})"


def vec_is_zero(v: Sequence[Scalar]) -> bool:
    return all(not x for x in v)


def vec_sub(a, b):
    return [x - y for x, y in zip(a, b)]


class Echelon:
    """Row-echelon factorization of a matrix, reusable for many
    right-hand sides.

    Rows of the input are eliminated in order; pivot columns follow the
    given column order (identity by default).  Solutions put free
    variables to zero, which makes preimage choices canonical.
    """

    def __init__(self, matrix: Matrix, col_order: Optional[Sequence[int]] = None):
        self.ncols = matrix.cols
        self.col_order = list(col_order) if col_order is not None else list(range(matrix.cols))
        # each entry: (pivot_col, reduced row, reduced rhs-combination rows)
        self.pivot_cols: list = []
        self.rrows: list = []  # reduced rows (lists), unit pivot, zeros elsewhere in pivot cols
        self.ops: list = []    # row of left-multiplier T recording combination of input rows
        self._nrows_in = 0
        for row in matrix.data:
            self._insert(list(row))

    def _insert(self, row):
        idx = self._nrows_in
        self._nrows_in += 1
        op = {idx: ONE}
        for p, (pc, rrow, rop) in enumerate(zip(self.pivot_cols, self.rrows, self.ops)):
            c = row[pc]
            if c:
                for j in range(self.ncols):
                    if rrow[j]:
                        row[j] = row[j] - c * rrow[j]
                for k, v in rop.items():
                    s = op.get(k, ZERO) - c * v
                    if s:
                        op[k] = s
                    elif k in op:
                        del op[k]
        piv = None
        for j in self.col_order:
            if row[j]:
                piv = j
                break
        if piv is None:
            return
        inv = row[piv]
        row = [v / inv for v in row]
        op = {k: v / inv for k, v in op.items()}
        # back-eliminate the new pivot column from existing rows
        for p in range(len(self.rrows)):
            c = self.rrows[p][piv]
            if c:
                rr = self.rrows[p]
                for j in range(self.ncols):
                    if row[j]:
                        rr[j] = rr[j] - c * row[j]
                rop = self.ops[p]
                for k, v in op.items():
                    s = rop.get(k, ZERO) - c * v
                    if s:
                        rop[k] = s
                    elif k in rop:
                        del rop[k]
        self.pivot_cols.append(piv)
        self.rrows.append(row)
        self.ops.append(op)

    @property
    def rank(self) -> int:
        return len(self.pivot_cols)

    def solve(self, rhs: Sequence[Scalar], matrix: Matrix) -> Optional[list]:
        """One solution of matrix @ x = rhs with free variables zero, or
        None when infeasible.  `matrix` must be the factored matrix."""
        sparse = {i: v for i, v in enumerate(rhs) if v is not ZERO and v}
        sol = self.solve_sparse(sparse, matrix)
        if sol is None:
            return None
        out = [ZERO] * self.ncols
        for i, v in sol.items():
            out[i] = v
        return out

    def solve_sparse(self, rhs: dict, matrix: Matrix) -> Optional[dict]:
        """Sparse variant of solve: rhs and the result are index->Scalar
        maps; None when infeasible."""
        x: dict = {}
        for p, op in enumerate(self.ops):
            s = ZERO
            for k, v in op.items():
                r = rhs.get(k)
                if r is not None:
                    s = s + v * r
            if s:
                x[self.pivot_cols[p]] = s
        # feasibility: matrix @ x must reproduce rhs exactly
        chk: dict = {}
        for j, xv in x.items():
            for i, v in matrix.col_sparse(j):
                t = chk.get(i, ZERO) + v * xv
                if t:
                    chk[i] = t
                elif i in chk:
                    del chk[i]
        if chk != rhs:
            return None
        return x

    def nullspace(self) -> list:
        """Basis of the kernel, one vector per free column."""
        pivset = set(self.pivot_cols)
        basis = []
        for j in range(self.ncols):
            if j in pivset:
                continue
            v = [ZERO] * self.ncols
            v[j] = ONE
            for p, pc in enumerate(self.pivot_cols):
                c = self.rrows[p][j]
                if c:
                    v[pc] = ZERO - c
            basis.append(v)
        return basis


class SpanBuilder:
    """Incrementally grown span with fast membership tests.  Not canonical;
    use Subspace for comparisons."""

    __slots__ = ("ambient_dim", "_rows", "_pivots")

    def __init__(self, ambient_dim: int):
        self.ambient_dim = ambient_dim
        self._rows: list = []
        self._pivots: list = []

    def _reduce(self, vec):
        v = list(vec)
        for row, p in zip(self._rows, self._pivots):
            c = v[p]
            if c:
                for i in range(self.ambient_dim):
                    if row[i]:
                        v[i] = v[i] - c * row[i]
        return v

    def insert(self, vec) -> bool:
        """Add vec to the span; True when the rank grew."""
        v = self._reduce(vec)
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            return False
        inv = v[piv]
        self._rows.append([x / inv for x in v])
        self._pivots.append(piv)
        return True

    def contains(self, vec) -> bool:
        return vec_is_zero(self._reduce(vec))

    @property
    def dim(self) -> int:
        return len(self._rows)

    def vectors(self) -> list:
        return [list(r) for r in self._rows]


class Subspace:
    """Subspace of Q(i)^n held as a reduced column echelon basis, so equal
    subspaces have identical representations."""

    __slots__ = ("ambient_dim", "basis", "_pivots")

    def __init__(self, ambient_dim: int, basis: list, pivots: list):
        self.ambient_dim = ambient_dim
        self.basis = basis      # list of column vectors (lists of Scalar)
        self._pivots = pivots   # pivot row per basis vector, strictly increasing

    @staticmethod
    def from_vectors(ambient_dim: int, vectors: Iterable[Sequence[Scalar]]) -> "Subspace":
        basis: list = []
        pivots: list = []
        for raw in vectors:
            v = list(raw)
            if len(v) != ambient_dim:
                raise DimensionMismatch(f"vector length {len(v)} in ambient {ambient_dim}")
            for b, p in zip(basis, pivots):
                c = v[p]
                if c:
                    for i in range(ambient_dim):
                        if b[i]:
                            v[i] = v[i] - c * b[i]
            piv = next((i for i, x in enumerate(v) if x), None)
            if piv is None:
                continue
            inv = v[piv]
            v = [x / inv for x in v]
            for b in basis:
                c = b[piv]
                if c:
                    for i in range(ambient_dim):
                        if v[i]:
                            b[i] = b[i] - c * v[i]
            # keep pivot order sorted for canonical form
            pos = 0
            while pos < len(pivots) and pivots[pos] < piv:
                pos += 1
            basis.insert(pos, v)
            pivots.insert(pos, piv)
        return Subspace(ambient_dim, basis, pivots)

    @staticmethod
    def full(n: int) -> "Subspace":
        return Subspace.from_vectors(n, Matrix.identity(n).transpose().data)

    @staticmethod
    def zero(n: int) -> "Subspace":
        return Subspace(n, [], [])

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, vec: Sequence[Scalar]) -> bool:
        v = list(vec)
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("ambient dimension mismatch")
        for b, p in zip(self.basis, self._pivots):
            c = v[p]
            if c:
                for i in range(self.ambient_dim):
                    if b[i]:
                        v[i] = v[i] - c * b[i]
        return vec_is_zero(v)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("comparing subspaces of different ambients")
        return self._pivots == other._pivots and self.basis == other.basis

    def __hash__(self):
        raise TypeError("Subspace is not hashable")

    def leq(self, other: "Subspace") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("comparing subspaces of different ambients")
        return all(other.contains(b) for b in self.basis)

    def __repr__(self):
        return f"Subspace(dim {self.dim} of {self.ambient_dim})"


def subspace_equal(u: Subspace, v: Subspace) -> bool:
    return u == v


def subspace_leq(u: Subspace, v: Subspace) -> bool:
    return u.leq(v)


def column_space(m: Matrix) -> Subspace:
    return Subspace.from_vectors(m.rows, [m.col(j) for j in range(m.cols)])


def rank_image_kernel(t: Matrix):
    """Rank, column space and null space of t (exact)."""
    ech = Echelon(t.transpose())  # row space of t^T = column space of t
    image = Subspace.from_vectors(t.rows, ech.rrows)
    ech2 = Echelon(t)
    kernel = Subspace.from_vectors(t.cols, ech2.nullspace())
    rank = image.dim
    assert rank == ech2.rank and rank + kernel.dim == t.cols  # rank-nullity
    return rank, image, kernel


def solve_linear(constraints, unknown_dim: int):
    """Solve a list of (row, rhs Scalar) constraints exactly.

    Returns (particular solution, solution Subspace).  Raises Infeasible
    when the constraints contradict each other.
    """
    rows = []
    rhs = []
    for row, b in constraints:
        if len(row) != unknown_dim:
            raise DimensionMismatch(f"constraint row length {len(row)} vs {unknown_dim}")
        rows.append(list(row))
        rhs.append(b)
    if not rows:
        return [ZERO] * unknown_dim, Subspace.full(unknown_dim)
    a = Matrix.from_rows(rows)
    ech = Echelon(a)
    sol = ech.solve(rhs, a)
    if sol is None:
        raise Infeasible("constraint system has no solution")
    return sol, Subspace.from_vectors(unknown_dim, ech.nullspace())


def solve_matrix_equation(a: Matrix, rhs_cols: list, col_order=None):
    """Batch-solve a @ x = rhs for every rhs in rhs_cols.

    Returns (solutions, nullspace_basis); each solution is None when its
    system is infeasible.  Free variables are set to zero, following
    col_order for pivot preference.
    """
    ech = Echelon(a, col_order=col_order)
    sols = [ech.solve(r, a) for r in rhs_cols]
    return sols, ech.nullspace()


def invert(m: Matrix) -> Optional[Matrix]:
    if m.rows != m.cols:
        return None
    ident = Matrix.identity(m.rows)
    sols, null = solve_matrix_equation(m, [ident.col(j) for j in range(m.rows)])
    if null or any(s is None for s in sols):
        return None
    return Matrix.from_cols(sols)


def _complement_of_kernel(t: Matrix) -> list:
    """Coordinate vectors on the pivot variables of t: a complement of Ker(t)."""
    ech = Echelon(t)
    out = []
    for pc in sorted(ech.pivot_cols):
        v = [ZERO] * t.cols
        v[pc] = ONE
        out.append(v)
    return out


def generalized_inverse(t: Matrix, e: Matrix, f: Matrix) -> Matrix:
    """The unique r with t r = e and r t = f, where e is an idempotent
    projecting onto Ran(t) and 1 - f an idempotent projecting onto Ker(t).

    Also satisfies t r t = t, r t r = r and r (1 - e) = 0.
    """
    n = t.rows
    if t.cols != n or e.rows != n or e.cols != n or f.rows != n or f.cols != n:
        raise DimensionMismatch("generalized_inverse needs square matrices of one size")
    if e * e != e:
        raise BadProjections("e is not idempotent")
    if f * f != f:
        raise BadProjections("f is not idempotent")
    rank, image_t, kernel_t = rank_image_kernel(t)
    if column_space(e) != image_t:
        raise BadProjections("image(e) differs from image(t)")
    one_minus_f = Matrix.identity(n) - f
    if column_space(one_minus_f) != kernel_t:
        raise BadProjections("image(1-f) differs from kernel(t)")
    # r is f on vectors t·xi (xi spanning a complement of Ker t) and 0 on Ran(1-e)
    xis = _complement_of_kernel(t)
    dom_cols = [t.apply(x) for x in xis]
    img_cols = [f.apply(x) for x in xis]
    comp = Matrix.identity(n) - e
    # extend t-image columns by independent columns of 1-e to a full basis
    basis_cols = list(dom_cols)
    values = list(img_cols)
    span = SpanBuilder(n)
    for c in dom_cols:
        span.insert(c)
    for j in range(n):
        c = comp.col(j)
        if span.insert(c):
            basis_cols.append(c)
            values.append([ZERO] * n)
    if len(basis_cols) != n:
        raise BadProjections("Ran(t) and Ran(1-e) do not span the space")
    b = Matrix.from_cols(basis_cols)
    binv = invert(b)
    assert binv is not None
    r = Matrix.from_cols(values) * binv
    if t * r != e:
        raise BadProjections("constructed r fails t r = e")
    if r * t != f:
        raise BadProjections("constructed r fails r t = f")
    return r
