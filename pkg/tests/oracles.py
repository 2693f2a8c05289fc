"""Independent reference computations: plain loops over itertools.product
and Fractions, sharing no code with the package."""
from fractions import Fraction
from itertools import product


def sign_matrix_rows(m):
    # itertools.product over (1, -1) walks the rows in binary-counting order
    return [list(r) for r in product((1, -1), repeat=m)]


def matvec(M, u):
    return [sum(Fraction(a) * b for a, b in zip(row, u)) for row in M]


def l1(M):
    return sum(abs(Fraction(x)) for row in M for x in row)


def opnorm_by_vertices(M):
    k = len(M[0])
    return max(sum(abs(y) for y in matvec(M, u)) for u in product((1, -1), repeat=k))


def gram(rows):
    return [[sum(a * b for a, b in zip(r, s)) for s in rows] for r in rows]


def harmonic(t):
    return sum(Fraction(1, h) for h in range(1, t + 1))
