"""Fundamental solution matrices.

Special fiber: row-vector solutions of y' = y G (omega = dt) or
t y' = y G with log layers (omega = dt/t), normalized so the constant,
log-free block is the identity; the constant Frobenius matrix C acts on
the solution basis by phi(Y) = C Y A, and with this normalization
C = A(0)^{-1}; the full identity is re-verified coefficient by
coefficient.

Generic fiber: divided-derivative expansion U_0 = I,
(k+1) U_{k+1} = U_k' + U_k G, either over exact rational functions or
over truncated Laurent series (windowed).
"""

from fractions import Fraction

from .errors import (DenominatorBlowup, FrobeniusMatrixNotConstant,
                     NotNilpotentResidue)
from .linalg import (identity_matrix, mat_mul, mat_scalar, mat_sub,
                     scalar_matrix_inverse, zero_matrix)
from .modules import OMEGA_DLOG, OMEGA_DT
from .series import (GenericCoefficient, TruncatedLogSeries, TruncatedSeries)


class SolutionPackage:
    __slots__ = ("config", "Y", "C", "residual_order", "rank")

    def __init__(self, config, Y, C, residual_order):
        self.config = config
        self.Y = Y                      # rows of TruncatedLogSeries
        self.C = C                      # Scalar matrix
        self.residual_order = residual_order
        self.rank = len(Y)


class GenericExpansion:
    __slots__ = ("config", "U", "depth", "exact", "rank")

    def __init__(self, config, U, exact):
        self.config = config
        self.U = U
        self.depth = len(U)
        self.exact = exact
        self.rank = len(U[0]) if U else 0

    def row_valuations(self, i):
        """[(k, v_k)] with v_k the min boundary valuation of row i of
        U_k; entries with an identically-zero row are skipped."""
        out = []
        for k, Uk in enumerate(self.U):
            vals = [e.gauss_valuation() if hasattr(e, "gauss_valuation")
                    else e.min_valuation()
                    for e in Uk[i] if not e.is_zero()]
            vals = [v for v in vals]
            if vals:
                out.append((k, min(vals)))
        return out


def _series_coeff_matrices(G, depth):
    """Decompose a matrix of series into {d: scalar coefficient matrix}."""
    n = len(G)
    out = {}
    cfg = G[0][0].config
    for i in range(n):
        for j in range(n):
            for d, c in G[i][j].coeffs.items():
                if d > depth:
                    continue
                if d not in out:
                    out[d] = [[cfg.zero() for _ in range(n)]
                              for _ in range(n)]
                out[d][i][j] = c
    return out


def _scalar_mat_is_zero(M):
    return all(c.is_zero() for row in M for c in row)


def solve_special(M, depth):
    """Fundamental solution matrix of the special fiber."""
    cfg = M.config
    n = M.rank
    gtrunc = min((e.trunc for row in M.G for e in row
                  if e.trunc is not None), default=None)
    if gtrunc is not None:
        depth = min(depth, gtrunc if M.omega == OMEGA_DLOG else gtrunc + 1)
    Gd = _series_coeff_matrices(M.G, depth)
    one, zero = cfg.one(), cfg.zero()
    I = identity_matrix(n, one, zero)
    if M.omega == OMEGA_DT:
        layers = {0: _solve_dt(Gd, I, n, cfg, depth)}
    else:
        layers = _solve_dlog(Gd, I, n, cfg, depth, M)
    Y = _assemble_rows(layers, cfg, n, depth)
    A0 = M.A0()
    C = scalar_matrix_inverse(A0, cfg)
    residual_order = _verify_frobenius(M, Y, C, depth)
    return SolutionPackage(cfg, Y, C, residual_order)


def _solve_dt(Gd, I, n, cfg, depth):
    """(d+1) Y_{d+1} = sum_{i+j=d} Y_i G_j, Y_0 = I."""
    Ys = {0: I}
    degs = sorted(Gd)
    for d in range(depth):
        acc = None
        for j in degs:
            if j > d:
                break
            prev = Ys.get(d - j)
            if prev is None:
                continue
            term = mat_mul(prev, Gd[j])
            acc = term if acc is None else [[a + b for a, b in zip(ra, rb)]
                                            for ra, rb in zip(acc, term)]
        if acc is None or _scalar_mat_is_zero(acc):
            continue
        inv = Fraction(1, d + 1)
        Ys[d + 1] = [[c * inv for c in row] for row in acc]
    return Ys


def _solve_dlog(Gd, I, n, cfg, depth, M):
    """Log-layer recursion for omega = dt/t with nilpotent G(0)."""
    G0 = Gd.get(0, zero_matrix(n, n, cfg.zero()))
    # nilpotency order
    P, order = I, 0
    while not _scalar_mat_is_zero(P):
        P = mat_mul(P, G0)
        order += 1
        if order > n:
            raise NotNilpotentResidue("G(0) is not nilpotent")
    kmax = order - 1
    # t^0 layer: Y_k(0) = G0^k / k!
    layers = {}
    pw = I
    fact = 1
    for k in range(kmax + 1):
        layers[k] = {0: [[c * Fraction(1, fact) for c in row] for row in pw]}
        pw = mat_mul(pw, G0)
        fact *= k + 1
    degs = sorted(d for d in Gd if d >= 1)
    for d in range(1, depth + 1):
        # right inverse of (d I - G0) = d (I - G0/d): finite Neumann sum
        inv = None
        term = I
        s = 0
        while not _scalar_mat_is_zero(term):
            scaled = [[c * Fraction(1, d ** (s + 1)) for c in row]
                      for row in term]
            inv = scaled if inv is None else [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(inv, scaled)]
            term = mat_mul(term, G0)
            s += 1
        for k in range(kmax, -1, -1):
            acc = None
            for j in degs:
                if j > d:
                    break
                prev = layers[k].get(d - j)
                if prev is None:
                    continue
                tm = mat_mul(prev, Gd[j])
                acc = tm if acc is None else [
                    [a + b for a, b in zip(ra, rb)]
                    for ra, rb in zip(acc, tm)]
            if k + 1 <= kmax:
                nxt = layers[k + 1].get(d)
                if nxt is not None:
                    tm = [[-c * (k + 1) for c in row] for row in nxt]
                    acc = tm if acc is None else [
                        [a + b for a, b in zip(ra, rb)]
                        for ra, rb in zip(acc, tm)]
            if acc is None:
                continue
            Yd = mat_mul(acc, inv)
            if not _scalar_mat_is_zero(Yd):
                layers[k][d] = Yd
    return layers


def _assemble_rows(layers, cfg, n, depth):
    Y = []
    for i in range(n):
        row = []
        for j in range(n):
            parts = {}
            for k, Yk in layers.items():
                coeffs = {}
                for d, mat in Yk.items():
                    c = mat[i][j]
                    if not c.is_zero():
                        coeffs[d] = c
                if coeffs:
                    parts[k] = TruncatedSeries(cfg, coeffs, depth)
            row.append(TruncatedLogSeries(cfg, parts)
                       if parts else
                       TruncatedLogSeries.from_series(
                           TruncatedSeries.zero(cfg, depth)))
        Y.append(row)
    return Y


def _verify_frobenius(M, Y, C, depth):
    """Check phi(Y) = C Y A on the common window; returns the verified
    order, raises if a nonzero residual appears."""
    cfg = M.config
    n = M.rank
    phiY = [[e.frobenius_substitute(M.phi_t) for e in row] for row in Y]
    CY = mat_mul(C, Y)
    CYA = mat_mul(CY, M.A)
    bound = None
    bad = None
    for i in range(n):
        for j in range(n):
            diff = phiY[i][j] - CYA[i][j]
            truncs = [s.trunc for s in diff.parts.values()
                      if s.trunc is not None]
            w = min(truncs) if truncs else depth
            bound = w if bound is None else min(bound, w)
            d = diff.truncate(w)
            if not d.is_zero():
                first = min(min(s.coeffs) for s in d.parts.values()
                            if s.coeffs)
                if bad is None or first < bad[0]:
                    bad = (first, i, j)
    if bad is not None:
        raise FrobeniusMatrixNotConstant(
            "phi(Y) != C Y A: residual at t-degree %d, entry (%d,%d)" % bad)
    return bound


def verify_package(M, S):
    """Independent replay of the solution-package identities."""
    from .modules import ValidationReport
    report = ValidationReport(M.label)
    n = M.rank
    # ODE: d(Y) = Y G with the form's derivation
    if M.omega == OMEGA_DT:
        dY = [[e.derivative() for e in row] for row in S.Y]
    else:
        dY = [[e.t_derivative() for e in row] for row in S.Y]
    YG = mat_mul(S.Y, M.G)
    for i in range(n):
        for j in range(n):
            diff = dY[i][j] - YG[i][j]
            truncs = [s.trunc for s in diff.parts.values()
                      if s.trunc is not None]
            w = min(truncs) if truncs else S.residual_order
            if not diff.truncate(w).is_zero():
                report.fail("ode", "row %d, column %d" % (i, j))
    try:
        _verify_frobenius(M, S.Y, S.C, S.residual_order)
    except FrobeniusMatrixNotConstant as exc:
        report.fail("frobenius", str(exc))
    report.residual_order = S.residual_order
    return report


DEFAULT_DEGREE_CAP = 4096


def solve_generic(Mg, depth, degree_cap=DEFAULT_DEGREE_CAP):
    """Divided-derivative expansion at the generic point."""
    cfg = Mg.config
    n = Mg.rank
    if Mg.exact:
        one = GenericCoefficient.one(cfg)
        zero = GenericCoefficient.zero(cfg)
        I = identity_matrix(n, one, zero)
        U = [I]
        cur = I
        for k in range(depth - 1):
            dU = [[e.derivative() for e in row] for row in cur]
            GU = mat_mul(Mg.G_E, cur)
            inv = Fraction(1, k + 1)
            nxt = [[(a + b) * inv for a, b in zip(ra, rb)]
                   for ra, rb in zip(dU, GU)]
            for row in nxt:
                for e in row:
                    if e.degree_size() > degree_cap:
                        raise DenominatorBlowup(
                            "rational-function degree exceeded %d at term %d"
                            % (degree_cap, k + 1))
            U.append(nxt)
            cur = nxt
        return GenericExpansion(cfg, U, True)
    # truncated lane
    one = TruncatedSeries.from_scalar(cfg, cfg.one())
    zero = TruncatedSeries.zero(cfg)
    I = identity_matrix(n, one, zero)
    U = [I]
    cur = I
    for k in range(depth - 1):
        dU = [[e.derivative() for e in row] for row in cur]
        GU = mat_mul(Mg.G_E, cur)
        inv = Fraction(1, k + 1)
        nxt = [[(a + b).scalar_mul(inv) for a, b in zip(ra, rb)]
               for ra, rb in zip(dU, GU)]
        U.append(nxt)
        cur = nxt
    return GenericExpansion(cfg, U, False)
