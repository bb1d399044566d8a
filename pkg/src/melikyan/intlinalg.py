"""Integer row-style Hermite and Smith normal forms with transforms.

Vectors are rows.  All arithmetic uses Python ints; the matrices involved
here are a few dozen entries at most.
"""

from __future__ import annotations

from typing import Sequence

Matrix = list[list[int]]


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _copy(A: Sequence[Sequence[int]]) -> Matrix:
    return [list(map(int, row)) for row in A]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf(A: Sequence[Sequence[int]], ncols: int | None = None) -> tuple[Matrix, Matrix, list[int]]:
    """Row Hermite form.

    Returns ``(H, U, pivots)`` with ``U @ A == H``, U unimodular, the nonzero
    rows of H first and in echelon form with positive pivots, entries above
    each pivot reduced into ``[0, pivot)``.
    """
    H = _copy(A)
    m = len(H)
    n = ncols if ncols is not None else (len(H[0]) if H else 0)
    U = _identity(m)
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        # gcd-combine rows r.. into row r
        for i in range(r + 1, m):
            if H[i][c] == 0:
                continue
            a, b = H[r][c], H[i][c]
            g, x, y = _xgcd(a, b)
            ua, ub = a // g, b // g
            rr, ri = H[r], H[i]
            H[r] = [x * s + y * t for s, t in zip(rr, ri)]
            H[i] = [-ub * s + ua * t for s, t in zip(rr, ri)]
            urr, uri = U[r], U[i]
            U[r] = [x * s + y * t for s, t in zip(urr, uri)]
            U[i] = [-ub * s + ua * t for s, t in zip(urr, uri)]
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-v for v in H[r]]
            U[r] = [-v for v in U[r]]
        piv = H[r][c]
        for i in range(r):
            q = H[i][c] // piv
            if q:
                H[i] = [s - q * t for s, t in zip(H[i], H[r])]
                U[i] = [s - q * t for s, t in zip(U[i], U[r])]
        pivots.append(c)
        r += 1
    return H, U, pivots


def solve_rows(A: Sequence[Sequence[int]], x: Sequence[int]) -> list[int] | None:
    """Integer vector c with ``c @ A == x`` or None when none exists."""
    m = len(A)
    n = len(x)
    if m == 0:
        return [] if not any(x) else None
    H, U, pivots = hnf(A, n)
    rem = list(map(int, x))
    y = [0] * m
    for i, c in enumerate(pivots):
        if rem[c] % H[i][c]:
            return None
        y[i] = rem[c] // H[i][c]
        if y[i]:
            rem = [s - y[i] * t for s, t in zip(rem, H[i])]
    if any(rem):
        return None
    return [sum(y[i] * U[i][j] for i in range(m)) for j in range(m)]


def smith(A: Sequence[Sequence[int]], ncols: int | None = None) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``U @ A @ V == D`` with d_1 | d_2 | ... on the diagonal."""
    D = _copy(A)
    m = len(D)
    n = ncols if ncols is not None else (len(D[0]) if D else 0)
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(m, n):
        # pick the smallest nonzero entry in the trailing block as pivot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    D[i] = [s - q * u for s, u in zip(D[i], D[t])]
                    U[i] = [s - q * u for s, u in zip(U[i], U[t])]
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    for row in D:
                        row[j] -= q * row[t]
                    for row in V:
                        row[j] -= q * row[t]
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                # enforce divisibility of the trailing block by the pivot
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if D[i][j] % D[t][t]:
                            D[t] = [s + u for s, u in zip(D[t], D[i])]
                            U[t] = [s + u for s, u in zip(U[t], U[i])]
                            done = False
                            break
                    if not done:
                        break
        if D[t][t] < 0:
            D[t] = [-v for v in D[t]]
            U[t] = [-v for v in U[t]]
        t += 1
    return D, U, V


def inverse_unimodular(V: Sequence[Sequence[int]]) -> Matrix:
    n = len(V)
    H, U, pivots = hnf(V, n)
    if pivots != list(range(n)) or any(H[i][i] != 1 for i in range(n)):
        raise ValueError("matrix is not unimodular")
    return U
