"""Small exact linear-algebra helpers over the prime fields F_p.

Used for glue-code spans and duals, ribbon-free reduced row echelon forms of
discriminant-group generator matrices, and nondegeneracy determinants.  All
matrices are sequences of equal-length integer rows; entries are reduced
mod p on input.
"""

from __future__ import annotations

from itertools import product


def rref(rows, p: int):
    """Reduced row echelon form mod p.  Returns (rows, pivot_columns) with
    zero rows dropped; rows are tuples, pivots are 1, entries above and
    below pivots are 0."""
    mat = [[x % p for x in row] for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][col], -1, p)
        mat[r] = [(x * inv) % p for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                c = mat[i][col]
                mat[i] = [(a - c * b) % p for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r]], pivots


def span(rows, p: int):
    """All F_p-linear combinations of the rows, as a lexicographically sorted
    list of tuples."""
    basis, _ = rref(rows, p)
    if not basis:
        width = len(rows[0]) if rows else 0
        return [tuple([0] * width)]
    words = set()
    for coeffs in product(range(p), repeat=len(basis)):
        word = [0] * len(basis[0])
        for c, row in zip(coeffs, basis):
            if c:
                word = [(a + c * b) % p for a, b in zip(word, row)]
        words.add(tuple(word))
    return sorted(words)


def nullspace(rows, p: int):
    """Basis (list of tuples) of the right nullspace mod p of the matrix."""
    if not rows:
        return []
    ncols = len(rows[0])
    basis, pivots = rref(rows, p)
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for row, pc in zip(basis, pivots):
            vec[pc] = (-row[fc]) % p
        out.append(tuple(vec))
    return out


def det(mat, p: int) -> int:
    """Determinant mod p of a square matrix."""
    m = [[x % p for x in row] for row in mat]
    n = len(m)
    out = 1
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col]), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            out = (-out) % p
        out = (out * m[col][col]) % p
        inv = pow(m[col][col], -1, p)
        for i in range(col + 1, n):
            if m[i][col]:
                c = (m[i][col] * inv) % p
                m[i] = [(a - c * b) % p for a, b in zip(m[i], m[col])]
    return out % p


def solve(mat, rhs, p: int):
    """One solution x of mat @ x = rhs mod p, or None if inconsistent."""
    if not mat:
        return None
    aug = [list(row) + [b] for row, b in zip(mat, rhs)]
    red, pivots = rref(aug, p)
    ncols = len(mat[0])
    x = [0] * ncols
    for row, pc in zip(red, pivots):
        if pc == ncols:
            return None
        x[pc] = row[-1] % p
    return tuple(x)
