"""Matrix utilities over the exact entry rings used in this package
(field scalars, truncated series, log series, rational functions).

Matrices are plain lists of row lists.  Entry rings must support
+, -, * and is_zero(); field-like rings additionally /.
"""

from itertools import combinations, permutations

from .errors import SingularMatrix
from .scalars import Scalar
from .series import TruncatedSeries


def mat_shape(M):
    return len(M), len(M[0]) if M else 0


def identity_matrix(n, one, zero):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zero_matrix(rows, cols, zero):
    return [[zero for _ in range(cols)] for _ in range(rows)]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_neg(A):
    return [[-a for a in row] for row in A]


def mat_scalar(A, c):
    return [[a * c for a in row] for row in A]


def mat_mul(A, B):
    n, k = mat_shape(A)
    k2, m = mat_shape(B)
    assert k == k2
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for s in range(k):
                term = A[i][s] * B[s][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def mat_transpose(A):
    return [list(col) for col in zip(*A)]


def mat_map(A, f):
    return [[f(a) for a in row] for row in A]


def mat_is_zero(A):
    return all(a.is_zero() for row in A for a in row)


def kron(A, B):
    """Kronecker product: (A x B)[(i,k),(j,l)] = A[i][j] * B[k][l]."""
    na, ma = mat_shape(A)
    nb, mb = mat_shape(B)
    out = []
    for i in range(na):
        for k in range(nb):
            row = []
            for j in range(ma):
                for l in range(mb):
                    row.append(A[i][j] * B[k][l])
            out.append(row)
    return out


def block_diag(A, B, zero):
    na, ma = mat_shape(A)
    nb, mb = mat_shape(B)
    out = zero_matrix(na + nb, ma + mb, zero)
    for i in range(na):
        for j in range(ma):
            out[i][j] = A[i][j]
    for i in range(nb):
        for j in range(mb):
            out[na + i][ma + j] = B[i][j]
    return out


def determinant(A):
    """Division-free determinant by permutation expansion (small n)."""
    n, m = mat_shape(A)
    assert n == m
    acc = None
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        # count inversions
        inv = sum(1 for i in range(n) for j in range(i + 1, n)
                  if seen[i] > seen[j])
        sign = -1 if inv % 2 else 1
        term = None
        for i in range(n):
            f = A[i][perm[i]]
            term = f if term is None else term * f
        if sign < 0:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def wedge_power(A, k):
    """k-th exterior power: rows/cols indexed by sorted k-subsets, entries
    are k x k minors."""
    n, m = mat_shape(A)
    assert n == m
    idx = list(combinations(range(n), k))
    out = []
    for rows in idx:
        out_row = []
        for cols in idx:
            minor = [[A[i][j] for j in cols] for i in rows]
            out_row.append(determinant(minor))
        out.append(out_row)
    return out


def mat_inverse_field(M, one, zero, div=None):
    """Inverse over a field-like entry ring by Gaussian elimination."""
    if div is None:
        div = lambda a, b: a / b
    n, m = mat_shape(M)
    assert n == m
    A = [list(row) for row in M]
    B = identity_matrix(n, one, zero)
    for col in range(n):
        piv = next((r for r in range(col, n)
                    if not A[r][col].is_zero()), None)
        if piv is None:
            raise SingularMatrix("singular matrix in inversion")
        A[col], A[piv] = A[piv], A[col]
        B[col], B[piv] = B[piv], B[col]
        pval = A[col][col]
        A[col] = [div(a, pval) for a in A[col]]
        B[col] = [div(b, pval) for b in B[col]]
        for r in range(n):
            if r == col or A[r][col].is_zero():
                continue
            f = A[r][col]
            A[r] = [a - f * ac for a, ac in zip(A[r], A[col])]
            B[r] = [b - f * bc for b, bc in zip(B[r], B[col])]
    return B


def solve_field(M, rhs_rows, one, zero, div=None):
    """Solve X * M = rhs (row convention): returns X with rows
    expressing each rhs row in terms of M's rows."""
    Minv = mat_inverse_field(M, one, zero, div=div)
    return mat_mul(rhs_rows, Minv)


def scalar_matrix_inverse(M, config):
    """Inverse of a matrix over K."""
    return mat_inverse_field(M, config.one(), config.zero())


def char_poly(M, config):
    """Characteristic polynomial det(X I - M) over K by the
    Faddeev-LeVerrier recursion; returns [c_0, ..., c_n] with c_n = 1."""
    n, m = mat_shape(M)
    assert n == m
    one, zero = config.one(), config.zero()
    coeffs = [zero] * (n + 1)
    coeffs[n] = one
    Mk = identity_matrix(n, one, zero)
    for k in range(1, n + 1):
        Mk = mat_mul(M, Mk)
        tr = Mk[0][0]
        for i in range(1, n):
            tr = tr + Mk[i][i]
        c = -(tr / k)
        coeffs[n - k] = c
        for i in range(n):
            Mk[i][i] = Mk[i][i] + c
    return coeffs


def series_matrix_inverse(A, config, trunc):
    """Inverse of a matrix of TruncatedSeries with A(0) invertible.

    Tries the exact adjugate route when det A is a single term (so the
    inverse is an exact Laurent polynomial); otherwise Newton iteration
    X <- X (2I - A X) through degree trunc.
    """
    n, _ = mat_shape(A)
    all_poly = all(e.trunc is None for row in A for e in row)
    if all_poly:
        det = determinant(A)
        if len(det.coeffs) == 1:
            (l, c), = det.coeffs.items()
            cinv = c.inverse()
            adj = _adjugate(A, config)
            return [[TruncatedSeries(
                config,
                {e - l: a * cinv for e, a in adj[i][j].coeffs.items()},
                None) for j in range(n)] for i in range(n)]
    zero_s = TruncatedSeries.zero(config)
    one_s = TruncatedSeries.from_scalar(config, config.one())
    A0 = [[e.constant_term() for e in row] for row in A]
    X0 = scalar_matrix_inverse(A0, config)
    # Newton X <- X(2I - AX); iterates are kept untagged and capped by
    # hand (the window rule would pin precision at the seed's window),
    # then tagged with the final validity bound
    X = [[TruncatedSeries.from_scalar(config, c) for c in row] for row in X0]
    I = identity_matrix(n, one_s, zero_s)

    def cap(M, prec):
        return [[TruncatedSeries(config,
                                 {i: c for i, c in e.coeffs.items()
                                  if i <= prec}, None)
                 for e in row] for row in M]

    prec = 0
    while prec < trunc:
        prec = min(2 * prec + 1, trunc)
        At = cap(A, prec)
        AX = mat_mul(At, X)
        X = cap(mat_mul(X, mat_sub(mat_scalar(I, 2), AX)), prec)
    a_window = None
    for row in A:
        for e in row:
            if e.trunc is not None:
                a_window = e.trunc if a_window is None else min(a_window,
                                                                e.trunc)
    bound = trunc if a_window is None else min(trunc, a_window)
    return [[e.truncate(bound) for e in row] for row in X]


def _adjugate(A, config):
    """Adjugate matrix (transpose of cofactors)."""
    n, _ = mat_shape(A)
    if n == 1:
        return [[TruncatedSeries.from_scalar(config, config.one())]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[A[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            d = determinant(minor)
            if (i + j) % 2:
                d = -d
            adj[j][i] = d
    return adj
