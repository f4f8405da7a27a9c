"""Matrix-presented differential modules with Frobenius structure.

A presentation is a pair of n x n matrices (A, G) over truncated series,
a form choice omega in {dt, dt/t}, and a Frobenius lift phi(t).  The
basis convention is columns-act: nabla(e_j) = sum_i e_i G[i][j] omega and
phi(e_j) = sum_i e_i A[i][j].  The defining compatibility is

    d(A) + G A = (phi(omega)/omega) A phi(G)

where d = d/dt, phi(omega)/omega = dphi/dt for omega = dt, and
d = t d/dt, phi(omega)/omega = t phi'(t)/phi(t) for omega = dt/t.
"""

from fractions import Fraction

from .errors import (FieldMismatch, FormMismatch, NonPolynomialEntry,
                     NotNilpotentResidue, SingularA, ZeroTwist)
from .linalg import (block_diag, determinant, identity_matrix, kron,
                     mat_is_zero, mat_mul, mat_shape, mat_sub,
                     mat_transpose, series_matrix_inverse, zero_matrix)
from .scalars import FieldConfig, Scalar
from .series import GenericCoefficient, TruncatedSeries, check_frobenius_lift

OMEGA_DT = "dt"
OMEGA_DLOG = "dt/t"


def _coerce_entry(config, e):
    if isinstance(e, TruncatedSeries):
        return e
    if isinstance(e, (int, Fraction)):
        return TruncatedSeries.from_scalar(config, config.rational(e))
    if isinstance(e, Scalar):
        return TruncatedSeries.from_scalar(config, e)
    raise TypeError("bad matrix entry %r" % (e,))


class ModulePresentation:
    __slots__ = ("config", "rank", "A", "G", "omega", "phi_t", "label")

    def __init__(self, config, A, G, omega=OMEGA_DT, phi_t=None, label=""):
        n = len(A)
        assert all(len(row) == n for row in A)
        assert len(G) == n and all(len(row) == n for row in G)
        if omega not in (OMEGA_DT, OMEGA_DLOG):
            raise FormMismatch("omega must be 'dt' or 'dt/t'")
        if phi_t is None:
            phi_t = TruncatedSeries.monomial(config, config.q)
        self.config = config
        self.rank = n
        self.A = [[_coerce_entry(config, e) for e in row] for row in A]
        self.G = [[_coerce_entry(config, e) for e in row] for row in G]
        self.omega = omega
        self.phi_t = phi_t
        self.label = label

    # --- helpers ------------------------------------------------------

    def _zero(self):
        return TruncatedSeries.zero(self.config)

    def _one(self):
        return TruncatedSeries.from_scalar(self.config, self.config.one())

    def A0(self):
        return [[e.constant_term() for e in row] for row in self.A]

    def G0(self):
        return [[e.constant_term() for e in row] for row in self.G]

    def working_trunc(self):
        truncs = [e.trunc for row in self.A for e in row
                  if e.trunc is not None]
        truncs += [e.trunc for row in self.G for e in row
                   if e.trunc is not None]
        return min(truncs) if truncs else None

    def phi_entry(self, e):
        return e.substitute(self.phi_t)

    def phi_matrix(self, M):
        return [[self.phi_entry(e) for e in row] for row in M]

    def omega_factor(self):
        """phi(omega)/omega as a series."""
        if self.omega == OMEGA_DT:
            return self.phi_t.derivative()
        num = self.phi_t.t_derivative()
        return num.divide(self.phi_t)

    def d_matrix(self, M):
        if self.omega == OMEGA_DT:
            return [[e.derivative() for e in row] for row in M]
        return [[e.t_derivative() for e in row] for row in M]

    # --- validation ---------------------------------------------------

    def validate(self, tol_order=None):
        report = ValidationReport(self.label)
        try:
            check_frobenius_lift(self.phi_t, self.config.q)
        except Exception as exc:
            report.fail("frobenius_lift", str(exc))
        # invertibility of A over the coefficient ring
        det = determinant(self.A)
        if det.is_zero():
            report.fail("invertible", "det A = 0 on the computed window")
        else:
            c0 = det.coeffs.get(det.low_order())
            if det.low_order() > 0 and det.trunc is not None:
                report.fail("invertible",
                            "det A vanishes at t = 0")
            elif c0 is None:
                report.fail("invertible", "empty determinant")
        if self.omega == OMEGA_DLOG:
            if not _is_nilpotent(self.G0(), self.config):
                report.fail("nilpotent_residue", "G(0) is not nilpotent")
        # compatibility identity
        lhs = mat_sub(_matadd(self.d_matrix(self.A),
                              mat_mul(self.G, self.A)),
                      _scale_mat(mat_mul(self.A, self.phi_matrix(self.G)),
                                 self.omega_factor()))
        bound = _matrix_trunc(lhs)
        if tol_order is not None:
            bound = min(bound, tol_order) if bound is not None else tol_order
        off = _first_nonzero_coeff(lhs, bound)
        if off is not None:
            report.fail("compatibility",
                        "residual at t-degree %d, entry (%d,%d)" % off)
        else:
            report.residual_order = bound
        return report


class ValidationReport:
    __slots__ = ("label", "failures", "residual_order")

    def __init__(self, label=""):
        self.label = label
        self.failures = []
        self.residual_order = None

    def fail(self, check, detail):
        self.failures.append((check, detail))

    @property
    def ok(self):
        return not self.failures

    def __repr__(self):
        return ("ValidationReport(label=%r, ok=%s, failures=%r, "
                "residual_order=%r)" % (self.label, self.ok, self.failures,
                                        self.residual_order))


def _matadd(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _scale_mat(M, s):
    return [[e * s for e in row] for row in M]


def _matrix_trunc(M):
    truncs = [e.trunc for row in M for e in row if e.trunc is not None]
    return min(truncs) if truncs else None


def _first_nonzero_coeff(M, bound):
    worst = None
    for i, row in enumerate(M):
        for j, e in enumerate(row):
            for d, c in e.coeffs.items():
                if bound is not None and d > bound:
                    continue
                if not c.is_zero():
                    if worst is None or d < worst[0]:
                        worst = (d, i, j)
    return worst


def _is_nilpotent(M, config):
    n = len(M)
    P = M
    for _ in range(n):
        if all(c.is_zero() for row in P for c in row):
            return True
        P = mat_mul(P, M)
    return all(c.is_zero() for row in P for c in row)


# --- functors ---------------------------------------------------------


def dual(M, trunc=None):
    """Dual presentation (transpose inverse of A, minus transpose G)."""
    if trunc is None:
        trunc = M.working_trunc()
        if trunc is None:
            trunc = 64
    try:
        Ainv = series_matrix_inverse(M.A, M.config, trunc)
    except Exception as exc:
        raise SingularA(str(exc))
    return ModulePresentation(M.config, mat_transpose(Ainv),
                              [[-e for e in row]
                               for row in mat_transpose(M.G)],
                              M.omega, M.phi_t,
                              label="dual(%s)" % M.label)


def _check_compatible(M, N):
    if M.config != N.config:
        raise FieldMismatch("different field configs")
    if M.omega != N.omega:
        raise FormMismatch("different forms")
    if M.phi_t != N.phi_t:
        raise FormMismatch("different Frobenius lifts")


def tensor(M, N):
    _check_compatible(M, N)
    n, m = M.rank, N.rank
    one, zero = M._one(), M._zero()
    A = kron(M.A, N.A)
    G = _matadd(kron(M.G, identity_matrix(m, one, zero)),
                kron(identity_matrix(n, one, zero), N.G))
    return ModulePresentation(M.config, A, G, M.omega, M.phi_t,
                              label="tensor(%s,%s)" % (M.label, N.label))


def direct_sum(M, N):
    _check_compatible(M, N)
    zero = M._zero()
    return ModulePresentation(M.config, block_diag(M.A, N.A, zero),
                              block_diag(M.G, N.G, zero),
                              M.omega, M.phi_t,
                              label="sum(%s,%s)" % (M.label, N.label))


def twist(M, c):
    if isinstance(c, (int, Fraction)):
        c = M.config.rational(c)
    if c.is_zero():
        raise ZeroTwist("twist constant must be nonzero")
    return ModulePresentation(M.config,
                              [[e.scalar_mul(c) for e in row]
                               for row in M.A],
                              M.G, M.omega, M.phi_t,
                              label="twist(%s)" % M.label)


def pushforward(M, a):
    if a < 1:
        raise ValueError("a must be >= 1")
    A = M.A
    phi_pow = M.phi_t
    for _ in range(a - 1):
        A = mat_mul(A, [[e.substitute(phi_pow) for e in row] for row in M.A])
        phi_pow = phi_pow.substitute(M.phi_t)
    cfg = M.config
    new_cfg = FieldConfig(cfg.p, cfg.m, cfg.q ** a)
    # re-tag every entry under the widened config (same p, m: values carry)
    def retag_s(s):
        return Scalar(new_cfg, s.coeffs)

    def retag(e):
        return TruncatedSeries(new_cfg,
                               {i: retag_s(c) for i, c in e.coeffs.items()},
                               e.trunc)
    new_phi = retag(phi_pow)
    return ModulePresentation(new_cfg,
                              [[retag(e) for e in row] for row in A],
                              [[retag(e) for e in row] for row in M.G],
                              M.omega, new_phi,
                              label="push%d(%s)" % (a, M.label))


class GenericPresentation:
    """Boundary-fiber presentation: connection rebased to d/dt, entries
    either exact rational functions (exact=True) or truncated Laurent
    series (exact=False)."""

    __slots__ = ("config", "rank", "A_E", "G_E", "exact", "label")

    def __init__(self, config, A_E, G_E, exact, label=""):
        self.config = config
        self.rank = len(A_E)
        self.A_E = A_E
        self.G_E = G_E
        self.exact = exact
        self.label = label


def to_generic(M, allow_truncated=False):
    """Boundary-fiber view; for omega = dt/t the connection matrix is
    divided by t so that it acts through d/dt."""
    entries = [e for row in M.A for e in row] + [e for row in M.G
                                                 for e in row]
    all_poly = all(e.trunc is None for e in entries)
    if not all_poly and not allow_truncated:
        raise NonPolynomialEntry(
            "matrix entries carry truncated tails; pass "
            "allow_truncated=True for windowed generic computations")
    G = M.G
    if M.omega == OMEGA_DLOG:
        G = [[e.shift(-1) for e in row] for row in G]
    if all_poly:
        A_E = [[GenericCoefficient(M.config, e) for e in row] for row in M.A]
        G_E = [[GenericCoefficient(M.config, e) for e in row] for row in G]
        return GenericPresentation(M.config, A_E, G_E, True, M.label)
    return GenericPresentation(M.config,
                               [list(row) for row in M.A],
                               [list(row) for row in G], False, M.label)
