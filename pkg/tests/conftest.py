import random

import pytest

from wmha.linalg import Matrix, SpanBuilder, rank_image_kernel, invert
from wmha.scalars import ONE, ZERO, Scalar, rational


def random_scalar(rng, allow_imaginary=True):
    num = rng.randint(-3, 3)
    den = rng.choice([1, 1, 1, 2, 3])
    re = rational(num, den)
    if allow_imaginary and rng.random() < 0.2:
        return Scalar(re.re, rational(rng.randint(-2, 2)).re)
    return re


def random_matrix(rng, rows, cols, density=0.6, allow_imaginary=True):
    m = Matrix.zero(rows, cols)
    for i in range(rows):
        for j in range(cols):
            if rng.random() < density:
                m.data[i][j] = random_scalar(rng, allow_imaginary)
    return m


def random_projection_pair(rng, t: Matrix):
    """(e, f) with e projecting onto Ran(t) along a random complement and
    1 - f projecting onto Ker(t) along a random complement."""
    n = t.rows
    _, image, kernel = rank_image_kernel(t)

    def projection_onto(subspace_basis, along_random):
        span = SpanBuilder(n)
        cols = [list(b) for b in subspace_basis]
        for b in cols:
            span.insert(b)
        extra = []
        guard = 0
        while span.dim < n:
            guard += 1
            assert guard < 500, "complement search stalled"
            v = [random_scalar(rng) for _ in range(n)]
            if span.insert(v):
                extra.append(v)
        basis = Matrix.from_cols(cols + extra)
        binv = invert(basis)
        sel = Matrix.zero(n, n)
        for i in range(len(cols)):
            sel.data[i][i] = ONE
        return basis * sel * binv

    e = projection_onto(image.basis, rng)
    # f projects onto a random complement of Ker(t) along Ker(t)
    span = SpanBuilder(n)
    for b in kernel.basis:
        span.insert(list(b))
    comp = []
    guard = 0
    while span.dim < n:
        guard += 1
        assert guard < 500
        v = [random_scalar(rng) for _ in range(n)]
        if span.insert(v):
            comp.append(v)
    basis = Matrix.from_cols(comp + [list(b) for b in kernel.basis])
    binv = invert(basis)
    sel = Matrix.zero(n, n)
    for i in range(len(comp)):
        sel.data[i][i] = ONE
    f = basis * sel * binv
    return e, f


def solve_geninv_by_constraints(t, e, f):
    """Independent second path to the generalized inverse: solve the
    entries of r from r t = f and r (1 - e) = 0; asserts uniqueness."""
    from wmha.linalg import solve_linear

    n = t.rows
    comp = Matrix.identity(n) - e
    constraints = []
    for i in range(n):
        for j in range(n):
            row = [ZERO] * (n * n)
            for k in range(n):
                row[i * n + k] = t.data[k][j]
            constraints.append((row, f.data[i][j]))
            row2 = [ZERO] * (n * n)
            for k in range(n):
                row2[i * n + k] = comp.data[k][j]
            constraints.append((row2, ZERO))
    sol, space = solve_linear(constraints, n * n)
    assert space.dim == 0, "generalized inverse must be unique"
    return Matrix.from_rows([[sol[i * n + j] for j in range(n)] for i in range(n)])


@pytest.fixture
def rng():
    return random.Random(20240817)
