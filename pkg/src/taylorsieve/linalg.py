"""Gaussian elimination over a finite field (matrices as lists of encoding rows).

Pivoting is deterministic: the first nonzero entry in column order.
"""

from __future__ import annotations

from typing import Sequence

from .gf import FieldCtx


def rref(rows: Sequence[Sequence[int]], ctx: FieldCtx, ncols: int | None = None):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    M = [list(r) for r in rows]
    if ncols is None:
        ncols = len(M[0]) if M else 0
    add, mul, neg, inv = ctx.add, ctx.mul, ctx.neg, ctx.inv
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(M):
            break
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        s = inv(M[r][c])
        if s != 1:
            M[r] = [mul(s, v) for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = neg(M[i][c])
                M[i] = [add(a, mul(f, b)) for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rank(rows, ctx: FieldCtx, ncols: int | None = None) -> int:
    return len(rref(rows, ctx, ncols)[1])


def nullspace(rows, ctx: FieldCtx, ncols: int) -> list[list[int]]:
    """Basis of {v : M v = 0}, one vector per free column, each with a 1 in
    its free column."""
    R, pivots = rref(rows, ctx, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for row, pc in zip(R, pivots):
            if row[fc]:
                v[pc] = ctx.neg(row[fc])
        basis.append(v)
    return basis


def normalize_first_nonzero(v: Sequence[int], ctx: FieldCtx) -> list[int]:
    """Scale so the first nonzero entry is 1."""
    for x in v:
        if x:
            s = ctx.inv(x)
            return [ctx.mul(s, y) for y in v]
    raise ValueError("zero vector")


def mat_vec(M, v, ctx: FieldCtx) -> list[int]:
    add, mul = ctx.add, ctx.mul
    out = []
    for row in M:
        acc = 0
        for a, b in zip(row, v):
            if a and b:
                acc = add(acc, mul(a, b))
        out.append(acc)
    return out


def det(M, ctx: FieldCtx) -> int:
    """Determinant by elimination."""
    n = len(M)
    A = [list(r) for r in M]
    add, mul, neg, inv = ctx.add, ctx.mul, ctx.neg, ctx.inv
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            d = neg(d)
        d = mul(d, A[c][c])
        s = inv(A[c][c])
        for i in range(c + 1, n):
            if A[i][c]:
                f = neg(mul(A[i][c], s))
                A[i] = [add(a, mul(f, b)) for a, b in zip(A[i], A[c])]
    return d
