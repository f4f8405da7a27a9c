"""Slope multisets, filtrations, Newton polygons, purity-of-bounded-
quotient detection, and the comparison checks between the special and
generic fibers.
"""

from fractions import Fraction

from .errors import (NonConvergent, SingularMatrix, SubspaceNotStable,
                     WidthMismatch)
from .growth import (DEFAULT_SNAP_DENOMINATOR, DEFAULT_TOL,
                     DEFAULT_WINDOW_START, GrowthEstimate,
                     _bracket_from_points, _finish, measure_log_growth,
                     snap_rational)
from .linalg import (char_poly, determinant, identity_matrix,
                     mat_inverse_field, mat_mul, mat_transpose,
                     series_matrix_inverse, wedge_power)
from .scalars import Scalar, log_p_floor_frac
from .series import GenericCoefficient, TruncatedLogSeries, TruncatedSeries


# ---------------------------------------------------------------------
# Frobenius slopes over K (constant matrices)
# ---------------------------------------------------------------------


def _poly_newton_slopes(coeffs):
    """Root valuations of a monic polynomial from its Newton polygon.

    coeffs = [c_0, ..., c_n] with c_n a unit; returns n valuations
    (counted with multiplicity, ascending)."""
    pts = [(i, c.valuation()) for i, c in enumerate(coeffs)
           if not c.is_zero()]
    if pts[0][0] != 0:
        raise SingularMatrix("zero constant coefficient (singular matrix)")
    # lower convex hull
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x2) >= (pt[1] - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    vals = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y2 - y1, x2 - x1)
        vals.extend([-s] * (x2 - x1))
    return sorted(vals)


def frobenius_slopes_special(C, config):
    """Slope multiset of the Frobenius matrix C over K, q-normalized."""
    coeffs = char_poly(C, config)
    vals = _poly_newton_slopes(coeffs)
    return sorted(Fraction(v, config.a) for v in vals)


def frobenius_slopes_special_oracle(C, config, iters=80):
    """Brute-force check: valuation growth of powers of exterior powers
    of C."""
    n = len(C)
    partial = [Fraction(0)]
    for k in range(1, n + 1):
        W = wedge_power(C, k) if k > 1 else C
        B = W
        ws = []
        for _ in range(iters):
            ws.append(min(c.valuation() for row in B for c in row
                          if not c.is_zero()))
            B = mat_mul(B, W)
        s = _stabilized_rate(ws)
        if s is None:
            s = _hull_rate(ws)
        if s is None:
            raise NonConvergent("no stable rate for wedge power %d" % k)
        partial.append(Fraction(s, config.a))
    return sorted(partial[k] - partial[k - 1] for k in range(1, n + 1))


def _hull_rate(ws, min_width=8):
    """Asymptotic rate of w_j via the lower convex hull of (j, w_j).

    Non-semisimple slope blocks add valuation terms like v_p(j) to the
    minimum-entry sequence, which kills exact periodicity; those spikes
    point upward only, so the hull's final edge still runs along the true
    linear tail."""
    start = len(ws) // 4
    pts = [(j, w) for j, w in enumerate(ws) if j >= start]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x2) >= (pt[1] - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    best = None
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x2 - x1 >= min_width and (best is None or x2 - x1 > best[0]):
            best = (x2 - x1, Fraction(y2 - y1, x2 - x1))
    return best[1] if best else None


def _stabilized_rate(ws, max_period=6, need=3):
    """Exact limit of w_j / j for an eventually linear-periodic integer/
    rational sequence: find period T with w_j - w_{j-T} constant on the
    tail, the rate is that constant / T."""
    for T in range(1, max_period + 1):
        if len(ws) < T * (need + 1):
            continue
        diffs = [ws[-1 - i] - ws[-1 - i - T] for i in range(need)]
        if all(d == diffs[0] for d in diffs):
            return Fraction(diffs[0], T)
    return None


# ---------------------------------------------------------------------
# Frobenius slopes over the boundary field
# ---------------------------------------------------------------------


def _entry_gauss_valuation(e):
    return e.gauss_valuation()


def _entry_frobenius(e, qexp):
    if isinstance(e, GenericCoefficient):
        return e.frobenius(qexp)
    return e.substitute_monomial(qexp)


def _entry_tcap(e, t_cap):
    """Drop coefficients of |exponent| > t_cap to keep iterations sparse;
    valuation minima in scope live at small exponents (windowed minimum,
    same caveat as every truncated computation)."""
    if isinstance(e, GenericCoefficient):
        return e
    kept = {i: c for i, c in e.coeffs.items() if abs(i) <= t_cap}
    return TruncatedSeries(e.config, kept, e.trunc)


def frobenius_slopes_generic(A_E, config, iters=14, t_cap=200000,
                             snap_denominator=None):
    """Slope multiset over the boundary field via exterior-power
    iteration B_j = B_{j-1} phi^{j-1}(wedge^k A)."""
    if snap_denominator is None:
        snap_denominator = DEFAULT_SNAP_DENOMINATOR
    n = len(A_E)
    q = config.q
    partial = [Fraction(0)]
    for k in range(1, n + 1):
        W = wedge_power(A_E, k) if k > 1 else A_E
        if k == n:
            # wedge^n is the determinant: exactly linear growth
            d = W[0][0]
            partial.append(Fraction(_entry_gauss_valuation(d), config.a))
            continue
        B = [[_entry_tcap(e, t_cap) for e in row] for row in W]
        ws = []
        qexp = q
        sk = None
        for j in range(iters):
            ws.append(min(_entry_gauss_valuation(e)
                          for row in B for e in row if not e.is_zero()))
            if len(ws) >= 4:
                d1, d2, d3 = (ws[-1] - ws[-2], ws[-2] - ws[-3],
                              ws[-3] - ws[-4])
                if d1 == d2 == d3:
                    sk = Fraction(d1)
                    break
            Wj = [[_entry_tcap(_entry_frobenius(e, qexp), t_cap)
                   for e in row] for row in W]
            B = [[_entry_tcap(e, t_cap) for e in row]
                 for row in mat_mul(B, Wj)]
            qexp *= q
        if sk is None:
            # snapped-ratio fallback
            cands = [snap_rational(Fraction(w, j + 1), snap_denominator * 4,
                                   DEFAULT_TOL)
                     for j, w in enumerate(ws[-3:], len(ws) - 3)]
            if cands[0] is not None and cands.count(cands[0]) == 3:
                sk = cands[0]
            else:
                raise NonConvergent(
                    "wedge power %d rate did not stabilize; last ratios %r"
                    % (k, [str(Fraction(w, j + 1))
                           for j, w in enumerate(ws)]))
        partial.append(Fraction(sk, config.a))
    slopes = sorted(partial[k] - partial[k - 1] for k in range(1, n + 1))
    return slopes


def triangular_slopes_oracle(A_E, config):
    """Closed form for triangular A: boundary valuation of each diagonal
    entry, q-normalized, sorted."""
    n = len(A_E)
    return sorted(Fraction(_entry_gauss_valuation(A_E[i][i]), config.a)
                  for i in range(n))


# ---------------------------------------------------------------------
# Newton polygons
# ---------------------------------------------------------------------


class NewtonPolygon:
    __slots__ = ("slope_multiset", "vertices")

    def __init__(self, slope_multiset):
        ms = sorted(Fraction(s) for s in slope_multiset)
        self.slope_multiset = ms
        verts = [(Fraction(0), Fraction(0))]
        x, y = Fraction(0), Fraction(0)
        for s in ms:
            x, y = x + 1, y + s
            verts.append((x, y))
        # collapse collinear points
        hull = [verts[0]]
        for pt in verts[1:]:
            while len(hull) >= 2:
                (x1, y1), (x2, y2) = hull[-2], hull[-1]
                if (y2 - y1) * (pt[0] - x2) == (pt[1] - y2) * (x2 - x1):
                    hull.pop()
                else:
                    break
            hull.append(pt)
        self.vertices = hull

    def width(self):
        return self.vertices[-1][0]

    def height(self):
        return self.vertices[-1][1]

    def evaluate(self, x):
        x = Fraction(x)
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:]):
            if x1 <= x <= x2:
                return y1 + (y2 - y1) * (x - x1) / (x2 - x1)
        raise ValueError("x outside polygon width")

    def __repr__(self):
        return "NewtonPolygon(%s)" % (self.slope_multiset,)


def newton_polygon(slope_multiset):
    return NewtonPolygon(slope_multiset)


def np_compare(a, b):
    """Position of polygon a relative to b: 'equal',
    'above_same_endpoints' (a on or above b, same endpoints),
    'crossing', or 'endpoint_mismatch'."""
    if a.width() != b.width():
        raise WidthMismatch("polygons of different width")
    if (a.vertices[0] != b.vertices[0]
            or a.vertices[-1] != b.vertices[-1]):
        return "endpoint_mismatch"
    xs = sorted({x for x, _ in a.vertices} | {x for x, _ in b.vertices})
    above = below = False
    for x in xs:
        d = a.evaluate(x) - b.evaluate(x)
        if d > 0:
            above = True
        elif d < 0:
            below = True
    if above and below:
        return "crossing"
    if below:
        return "crossing"  # a dips under b somewhere
    if above:
        return "above_same_endpoints"
    return "equal"


def gap_check(np):
    """Consecutive slope gaps at most 1."""
    ms = np.slope_multiset
    return all(b - a <= 1 for a, b in zip(ms, ms[1:]))


# ---------------------------------------------------------------------
# Growth filtrations
# ---------------------------------------------------------------------


class FiltrationReport:
    __slots__ = ("kind", "breakpoints", "dims", "slope_multiset", "rank",
                 "adapted_rows", "combination", "row_estimates")

    def __init__(self, kind, slope_multiset, rank, adapted_rows=None,
                 combination=None, row_estimates=None):
        ms = sorted(slope_multiset)
        self.kind = kind
        self.slope_multiset = ms
        self.rank = rank
        self.breakpoints = sorted(set(ms))
        self.dims = {b: sum(1 for s in ms if s <= b)
                     for b in self.breakpoints}
        self.adapted_rows = adapted_rows
        self.combination = combination
        self.row_estimates = row_estimates

    def dim_at(self, lam):
        lam = Fraction(lam)
        return sum(1 for s in self.slope_multiset if s <= lam)

    def b_nabla(self):
        return self.breakpoints[-1] if self.breakpoints else Fraction(0)

    def __repr__(self):
        return ("FiltrationReport(kind=%r, multiset=%s)"
                % (self.kind, self.slope_multiset))


def b_nabla(report):
    return report.b_nabla()


def _row_growth_special(row, window, snap_denominator, tol):
    """Growth of a solution row = max over its coordinates."""
    lo = up = None
    exact = True
    for e in row:
        if e.is_zero():
            continue
        est = measure_log_growth(e, window, snap_denominator, tol)
        if up is None or est.upper > up:
            up = est.upper
        if lo is None or est.lower > lo:
            lo = est.lower
        exact = exact and est.exact
    if up is None:
        return None
    if lo > up:
        lo = up
    return GrowthEstimate(lo, up, exact=exact and lo == up,
                          snapped=lo == up)


def _log_row_dominant(row, p, window):
    """Hull-dominant location of a special row: (entry index, L-degree,
    t-exponent, coefficient) on the top of the growth hull."""
    best = None
    for j, e in enumerate(row):
        for nL, s in e.parts.items():
            for i, c in s.coeffs.items():
                if i < 2:
                    continue
                if window and not (window[0] <= i <= window[1]):
                    continue
                x = log_p_floor_frac(i, p)
                y = -c.valuation() + nL
                if y <= 0:
                    continue
                # steepest ray from the origin, latest support wins ties
                score = (Fraction(y) / x, x)
                if best is None or score > best[0]:
                    best = (score, j, nL, i, c)
    if best is None:
        return None
    _, j, nL, i, c = best
    return j, nL, i, c


def growth_filtration_special(S, window=None, snap_denominator=None,
                              tol=None, max_rounds=4):
    """Growth-adapted basis of the special solution space by greedy
    elimination: subtract constant multiples of rows of smaller-or-equal
    measured growth to cancel hull-dominant coefficients."""
    cfg = S.config
    n = S.rank
    rows = [list(r) for r in S.Y]
    if window is None:
        trunc = min((s.trunc for r in rows for e in r
                     for s in e.parts.values() if s.trunc is not None),
                    default=None)
        if trunc is not None:
            window = (DEFAULT_WINDOW_START, trunc)
    comb = identity_matrix(n, cfg.one(), cfg.zero())
    ests = [_row_growth_special(r, window, snap_denominator, tol)
            for r in rows]
    for _ in range(max_rounds):
        changed = False
        order = sorted(range(n),
                       key=lambda i: (ests[i].upper
                                      if ests[i] is not None else
                                      Fraction(-10 ** 9), i))
        for pos, i in enumerate(order):
            if ests[i] is None or ests[i].upper == 0:
                continue
            dom = _log_row_dominant(rows[i], cfg.p, window)
            if dom is None:
                continue
            j, nL, exp, c = dom
            for s_idx in order[:pos]:
                if ests[s_idx] is None:
                    continue
                if ests[s_idx].upper > ests[i].upper:
                    continue
                cs = rows[s_idx][j].coeff(exp, nL)
                if cs.is_zero():
                    continue
                factor = c / cs
                cand = [a - factor * b
                        for a, b in zip(rows[i], rows[s_idx])]
                est_new = _row_growth_special(cand, window,
                                              snap_denominator, tol)
                if est_new is None or est_new.upper < ests[i].upper:
                    rows[i] = cand
                    comb[i] = [a - factor * b
                               for a, b in zip(comb[i], comb[s_idx])]
                    ests[i] = est_new
                    changed = True
                    break
        if not changed:
            break
    multiset = [est.value if est is not None else Fraction(0)
                for est in ests]
    return FiltrationReport("growth_special", multiset, n,
                            adapted_rows=rows, combination=comb)


# --- generic side -----------------------------------------------------


def _generic_row_points(U, i, p, window):
    pts = []
    for k in range(1, len(U)):
        row = U[k][i]
        vals = [e.gauss_valuation() for e in row if not e.is_zero()]
        if not vals:
            continue
        if window and not (window[0] <= k <= window[1]):
            continue
        pts.append((log_p_floor_frac(k, p), -min(vals)))
    return pts


def _generic_row_growth(U, i, p, window, snap_denominator, tol):
    all_zero_tail = True
    bounded = True
    for k in range(1, len(U)):
        vals = [e.gauss_valuation() for e in U[k][i] if not e.is_zero()]
        if vals:
            all_zero_tail = False
            if min(vals) < 0:
                bounded = False
    if all_zero_tail or bounded:
        return GrowthEstimate(0, 0, exact=True, snapped=True)
    pts = _generic_row_points(U, i, p, window)
    if len(pts) < 2:
        pts = _generic_row_points(U, i, p, None)
    lo, up, tight = _bracket_from_points(pts)
    return _finish(lo, up, snap_denominator, tol, exact=tight and lo == up)


def _generic_dominant(U, i, window):
    """(k*, j*) achieving the deepest valuation per log-index on the top
    hull of row i."""
    best = None
    p = None
    for k in range(2, len(U)):
        for j, e in enumerate(U[k][i]):
            if e.is_zero():
                continue
            if p is None:
                p = e.config.p
            v = e.gauss_valuation()
            if v >= 0:
                continue
            x = log_p_floor_frac(k, p)
            score = (Fraction(-v) / x, x)
            if best is None or score > best[0]:
                best = (score, k, j)
    if best is None:
        return None
    return best[1], best[2]


def _deepest_coefficient(e):
    """(valuation, degree) of the deepest coefficient of a series."""
    return min((c.valuation(), d) for d, c in e.coeffs.items()
               if not c.is_zero())


def _best_offender(cur, U, s_idx, window, assigned):
    """Pick the next elimination step in the truncated lane.

    Scans every negative-valuation coefficient (k, j, d) in the window;
    each one pins the monomial unknown n = d - ds, where ds is the
    deepest coefficient of the eliminator entry U[k][s][j].  Among the
    still-unassigned unknowns, the constraint whose eliminator
    coefficient sits deepest wins (it determines the unknown with the
    most p-adic accuracy); depth of the offender itself breaks ties.
    Returns (n, ds, k, j, d) or None."""
    best = None
    for k in range(window[0], min(window[1] + 1, len(cur))):
        for j, e in enumerate(cur[k]):
            den = U[k][s_idx][j]
            if den.is_zero():
                continue
            vs, ds = _deepest_coefficient(den)
            for d, c in e.coeffs.items():
                if c.is_zero():
                    continue
                v = c.valuation()
                if v >= 0:
                    continue
                n = d - ds
                if n < -window[0] or n in assigned:
                    continue
                key = (-vs, -v, k)
                if best is None or key > best[0]:
                    best = (key, n, ds, k, j, d)
    if best is None:
        return None
    return best[1:]


def _refine_row_series(U, i, s_idx, window, cfg, max_steps=48):
    """Monomial-by-monomial elimination of row i against row s_idx in the
    truncated lane.

    The elimination multiple is built as a sum of monomials f_n t^n.  A
    full series division is useless here: the inverse of a window
    denominator has wildly unbounded tail coefficients, and the tail
    garbage dominates every later measurement.  Instead each unknown f_n
    is solved exactly once, from the offending coefficient it reaches
    through the denominator's own deepest coefficient (a triangular
    solve by p-adic depth); constraints that would re-solve an already
    fixed unknown are skipped, their residue being exactly the
    approximation error the measurement is allowed to see.

    Returns (rows, factor) with factor the accumulated multiple, or None
    when no step was possible at all.
    """
    cur = [list(Uk[i]) for Uk in U]
    factor = TruncatedSeries.zero(cfg)
    assigned = set()
    stepped = False
    for _ in range(max_steps):
        off = _best_offender(cur, U, s_idx, window, assigned)
        if off is None:
            break
        n, ds, k, j, d = off
        den = U[k][s_idx][j]
        gamma = cur[k][j].coeff(d) / den.coeff(ds)
        term = TruncatedSeries.monomial(cfg, n, gamma)
        for k2 in range(len(cur)):
            sub = _entry_mul_row(term, U[k2][s_idx])
            cur[k2] = [a - b for a, b in zip(cur[k2], sub)]
        factor = factor + term
        assigned.add(n)
        stepped = True
    if not stepped:
        return None
    return cur, factor


def _entry_div(a, b):
    if isinstance(a, GenericCoefficient) or isinstance(b, GenericCoefficient):
        return a / b
    return a.divide(b)


def _entry_mul_row(c, row):
    return [c * e if isinstance(e, GenericCoefficient) else e * c
            for e in row]


def _frobenius_bounded_candidate(E, A_E, config, iters=14, out_trunc=48):
    """Candidate coordinates of a bounded solution row: the dominant
    eigenvector of the coordinate Frobenius c -> phi(c) A^{-1} by power
    iteration (the eigenline of most negative solution-side slope, which
    is where a bounded solution lives when one exists).

    This only proposes a combination; the caller must re-measure the
    combined row and accept it on the measured growth alone, so a module
    whose extreme-slope eigenline is unbounded simply keeps its
    elimination basis."""
    if E.exact:
        return None
    n = E.rank
    truncs = [e.trunc for row in A_E for e in row
              if isinstance(e, TruncatedSeries) and e.trunc is not None]
    base_trunc = min(truncs) if truncs else 96
    try:
        Ainv = _generic_A_inverse(A_E, config, False)
    except (SingularMatrix, ZeroDivisionError):
        return None
    q = config.q
    c = [TruncatedSeries.from_scalar(config, config.one())
         for _ in range(n)]
    for _ in range(iters):
        phic = [e.substitute_monomial(q) for e in c]
        new = []
        for l in range(n):
            s = TruncatedSeries.zero(config)
            for j in range(n):
                s = s + phic[j] * Ainv[j][l]
            new.append(s)
        nz = [e for e in new if not e.is_zero()]
        if not nz:
            return None
        v = min(e.gauss_valuation() for e in nz)
        scale = config.pi_power(-int(v * config.m))
        c = [e.scalar_mul(scale).truncate(base_trunc) for e in new]
    return [e.truncate(out_trunc) for e in c]


def _combine_original_rows(E, c):
    """Row c . U_k against the solver's original expansion, per order."""
    n = E.rank
    out = []
    for k in range(len(E.U)):
        row = None
        for j in range(n):
            if c[j].is_zero():
                continue
            term = _entry_mul_row(c[j], E.U[k][j])
            row = term if row is None else [a + b
                                            for a, b in zip(row, term)]
        if row is None:
            row = [TruncatedSeries.zero(E.config) for _ in range(n)]
        out.append(row)
    return out


def growth_filtration_generic(E, A_E=None, window=None,
                              snap_denominator=None, tol=None,
                              max_rounds=4):
    """Growth-adapted basis at the generic point.  Elimination multiples
    live in the boundary coefficient field (rational functions or
    windowed series), found as ratios of hull-dominant divided-derivative
    coefficients.  When the Frobenius matrix at the boundary is supplied,
    a power-iteration eigenrow is additionally offered as a replacement
    basis row (accepted only if its measured growth is smaller)."""
    cfg = E.config
    n = E.rank
    depth = E.depth
    if window is None:
        window = (min(DEFAULT_WINDOW_START, max(2, depth // 4)), depth - 1)
    U = [[list(row) for row in Uk] for Uk in E.U]
    if E.exact:
        one = GenericCoefficient.one(cfg)
        zero = GenericCoefficient.zero(cfg)
    else:
        one = TruncatedSeries.from_scalar(cfg, cfg.one())
        zero = TruncatedSeries.zero(cfg)
    comb = identity_matrix(n, one, zero)
    ests = [_generic_row_growth(U, i, cfg.p, window, snap_denominator, tol)
            for i in range(n)]
    for _ in range(max_rounds):
        changed = False
        order = sorted(range(n), key=lambda i: (ests[i].upper, i))
        for pos, i in enumerate(order):
            if ests[i].upper == 0:
                continue
            dom = _generic_dominant(U, i, window)
            if dom is None:
                continue
            kstar, jstar = dom
            for s_idx in order[:pos]:
                if ests[s_idx].upper > ests[i].upper:
                    continue
                if not comb[s_idx][i].is_zero():
                    # the eliminator already contains row i; subtracting
                    # it back merely rescales row i and fakes a drop
                    continue
                if E.exact:
                    denom = U[kstar][s_idx][jstar]
                    if denom.is_zero():
                        continue
                    factor = _entry_div(U[kstar][i][jstar], denom)
                    cand_U = []
                    for k in range(len(U)):
                        sub = _entry_mul_row(factor, U[k][s_idx])
                        cand_U.append([a - b
                                       for a, b in zip(U[k][i], sub)])
                else:
                    refined = _refine_row_series(U, i, s_idx, window, cfg)
                    if refined is None:
                        continue
                    cand_U, factor = refined
                est_new = _generic_row_growth(
                    [[r] for r in cand_U], 0, cfg.p, window,
                    snap_denominator, tol)
                if est_new.upper < ests[i].upper:
                    for k in range(len(U)):
                        U[k][i] = cand_U[k]
                    sub = _entry_mul_row(factor, comb[s_idx])
                    comb[i] = [a - b for a, b in zip(comb[i], sub)]
                    ests[i] = est_new
                    changed = True
                    break
        if not changed:
            break
    if A_E is not None and any(est.upper > 0 for est in ests):
        cand = _frobenius_bounded_candidate(E, A_E, cfg)
        if cand is not None and any(not e.is_zero() for e in cand):
            cand_U = _combine_original_rows(E, cand)
            est_cand = _generic_row_growth(
                [[r] for r in cand_U], 0, cfg.p, window,
                snap_denominator, tol)
            for i in sorted(range(n), key=lambda i: (-ests[i].upper, i)):
                if est_cand.upper >= ests[i].upper:
                    break
                if cand[i].is_zero():
                    continue
                trial = [list(r) for r in comb]
                trial[i] = list(cand)
                if determinant(trial).is_zero():
                    continue
                for k in range(len(U)):
                    U[k][i] = cand_U[k]
                comb = trial
                ests[i] = est_cand
                break
    multiset = [est.value for est in ests]
    return FiltrationReport("growth_generic", multiset, n,
                            adapted_rows=None, combination=comb,
                            row_estimates=list(ests))


def generic_log_growth_module_filtration(E, **kw):
    """Module-side filtration dimensions by duality: dim M^lambda =
    rank - dim Sol_lambda at the generic point."""
    sol = growth_filtration_generic(E, **kw)
    rep = FiltrationReport("module_generic", sol.slope_multiset, sol.rank,
                           combination=sol.combination)
    rep.dims = {b: sol.rank - sol.dims[b] for b in sol.breakpoints}
    return rep


# ---------------------------------------------------------------------
# PBQ test
# ---------------------------------------------------------------------


class PbqVerdict:
    __slots__ = ("is_pbq", "bounded_solution_dim", "bounded_slope_multiset",
                 "lambda_max_generic")

    def __init__(self, is_pbq, dim, multiset, lam_max):
        self.is_pbq = is_pbq
        self.bounded_solution_dim = dim
        self.bounded_slope_multiset = sorted(multiset)
        self.lambda_max_generic = lam_max

    def __repr__(self):
        return ("PbqVerdict(is_pbq=%s, dim=%d, slopes=%s, lambda_max=%s)"
                % (self.is_pbq, self.bounded_solution_dim,
                   self.bounded_slope_multiset, self.lambda_max_generic))


def _generic_A_inverse(A_E, config, exact):
    if exact:
        one = GenericCoefficient.one(config)
        zero = GenericCoefficient.zero(config)
        return mat_inverse_field(A_E, one, zero)
    # truncated lane: if every entry is an exact Laurent polynomial the
    # rational-function inverse is exact; otherwise invert as a series
    # matrix through the common window
    truncs = [e.trunc for row in A_E for e in row
              if isinstance(e, TruncatedSeries) and e.trunc is not None]
    if truncs:
        return series_matrix_inverse(A_E, config, min(truncs))
    Ag = [[GenericCoefficient(config, e) if not isinstance(
        e, GenericCoefficient) else e for e in row] for row in A_E]
    one = GenericCoefficient.one(config)
    zero = GenericCoefficient.zero(config)
    inv = mat_inverse_field(Ag, one, zero)
    return inv


def _gc_to_series(e, trunc):
    """Rational function -> truncated Laurent series."""
    if e.is_zero():
        return TruncatedSeries.zero(e.config, trunc)
    if len(e.den.coeffs) == 1 and e.den.coeffs.get(0) == e.config.one():
        return TruncatedSeries(e.config, e.num.coeffs, None)
    return e.num * e.den.invert(trunc)


def pbq_test(E, A_E, config, frob_slopes=None, window=None,
             snap_denominator=None, tol=None, sol=None):
    """Purity of the bounded quotient.

    Finds the bounded subspace W of the generic solution space, restricts
    the Frobenius action w -> phi(w) A^{-1} to it, and reports the
    module-side slope multiset of the bounded quotient (negated solution-
    side slopes); pure iff a single distinct slope.
    """
    if sol is None:
        sol = growth_filtration_generic(E, A_E=A_E, window=window,
                                        snap_denominator=snap_denominator,
                                        tol=tol)
    if frob_slopes is None:
        frob_slopes = frobenius_slopes_generic(A_E, config)
    lam_max = max(frob_slopes)
    comb = sol.combination
    if sol.row_estimates is not None:
        bounded_rows = [i for i, est in enumerate(sol.row_estimates)
                        if est is not None and est.upper == 0]
    else:
        bounded_rows = _bounded_rows_from_combination(E, comb, config)
    dim = len(bounded_rows)
    if dim == 0:
        return PbqVerdict(False, 0, [], lam_max)
    Ainv = _generic_A_inverse(A_E, config, E.exact)
    q = config.q
    # W rows as vectors over the entry field
    W = [list(comb[i]) for i in bounded_rows]
    if E.exact:
        Wg = [[e if isinstance(e, GenericCoefficient)
               else GenericCoefficient(config, e) for e in row] for row in W]
        phiW = [[e.frobenius(q) for e in row] for row in Wg]
        img = mat_mul(phiW, Ainv)
        Phi = _express_in_basis_exact(img, Wg, config)
    else:
        trunc = _min_entry_trunc(W)
        Ainv_s = [[e if isinstance(e, TruncatedSeries)
                   else _gc_to_series(e, trunc if trunc is not None else 64)
                   for e in row] for row in Ainv]
        phiW = [[e.substitute_monomial(q) for e in row] for row in W]
        img = mat_mul(phiW, Ainv_s)
        Phi = _express_in_basis_series(img, W, config)
    sol_side = _small_matrix_slopes(Phi, config)
    module_side = sorted(-s for s in sol_side)
    is_pbq = len(set(module_side)) == 1
    return PbqVerdict(is_pbq, dim, module_side, lam_max)


def _min_entry_trunc(rows):
    truncs = [e.trunc for row in rows for e in row
              if isinstance(e, TruncatedSeries) and e.trunc is not None]
    return min(truncs) if truncs else None


def _bounded_rows_from_combination(E, comb, config):
    """Indices i whose adapted generic row (comb applied to the solver
    rows) is bounded."""
    out = []
    n = E.rank
    for i in range(n):
        bounded = True
        nonzero_seen = False
        for k in range(1, len(E.U)):
            # adapted row coefficients: comb[i] . U_k
            row = None
            for s in range(n):
                c = comb[i][s]
                if c.is_zero():
                    continue
                term = _entry_mul_row(c, E.U[k][s])
                row = term if row is None else [a + b
                                                for a, b in zip(row, term)]
            if row is None:
                continue
            vals = [e.gauss_valuation() for e in row if not e.is_zero()]
            if vals:
                nonzero_seen = True
                if min(vals) < 0:
                    bounded = False
                    break
        if bounded:
            out.append(i)
    return out


def _express_in_basis_exact(img, W, config):
    """Solve Phi W = img over the rational-function field (least-squares-
    free: W has full row rank d <= n; use d independent columns)."""
    d = len(W)
    n = len(W[0])
    cols = _independent_columns(W, d)
    Wsq = [[W[i][j] for j in cols] for i in range(d)]
    one = GenericCoefficient.one(config)
    zero = GenericCoefficient.zero(config)
    Winv = mat_inverse_field(Wsq, one, zero)
    imgsq = [[img[i][j] for j in cols] for i in range(d)]
    Phi = mat_mul(imgsq, Winv)
    # verify on the remaining columns
    full = mat_mul(Phi, W)
    for i in range(d):
        for j in range(n):
            if not (full[i][j] - img[i][j]).is_zero():
                raise SubspaceNotStable(
                    "bounded subspace not Frobenius-stable at (%d,%d)"
                    % (i, j))
    return Phi


# residuals this deep (p-adic valuation) in the series-lane stability
# verification are attributed to windowed basis construction; genuine
# instability shows up at unit size
STABILITY_DEPTH = Fraction(6)


def _express_in_basis_series(img, W, config):
    d = len(W)
    n = len(W[0])
    cols = _independent_columns(W, d)
    trunc = _min_entry_trunc(W + img)
    if trunc is None:
        trunc = 64
    one = TruncatedSeries.from_scalar(config, config.one())
    zero = TruncatedSeries.zero(config)
    Wsq = [[W[i][j] for j in cols] for i in range(d)]
    Winv = mat_inverse_field(Wsq, one, zero,
                             div=lambda a, b: a.divide(b, trunc))
    imgsq = [[img[i][j] for j in cols] for i in range(d)]
    Phi = mat_mul(imgsq, Winv)
    full = mat_mul(Phi, W)
    check_trunc = _min_entry_trunc(full + img)
    for i in range(d):
        for j in range(n):
            diff = full[i][j] - img[i][j]
            if check_trunc is not None:
                diff = diff.truncate(check_trunc)
            if diff.is_zero():
                continue
            # basis rows in this lane are themselves windowed
            # approximations (monomial elimination, power iteration), so
            # a residual that sits p-adically far below the unit-sized
            # data is construction error, not instability
            if diff.gauss_valuation() < STABILITY_DEPTH:
                raise SubspaceNotStable(
                    "bounded subspace not Frobenius-stable at (%d,%d)"
                    % (i, j))
    return Phi


def _independent_columns(W, d):
    """First set of d columns on which the rows are independent (greedy,
    by symbolic elimination on a copy)."""
    n = len(W[0])
    chosen = []
    rows = [list(r) for r in W]
    used = [False] * len(rows)
    for j in range(n):
        piv = None
        for i in range(len(rows)):
            if not used[i] and not rows[i][j].is_zero():
                piv = i
                break
        if piv is None:
            continue
        chosen.append(j)
        used[piv] = True
        for i in range(len(rows)):
            if i == piv or rows[i][j].is_zero():
                continue
            f = _entry_div(rows[i][j], rows[piv][j])
            rows[i] = [a - (f * b if isinstance(f, GenericCoefficient)
                            else b * f)
                       for a, b in zip(rows[i], rows[piv])]
        if len(chosen) == d:
            break
    if len(chosen) < d:
        raise SubspaceNotStable("bounded rows are not independent")
    return chosen


def _small_matrix_slopes(Phi, config):
    """Slope multiset of a small semilinear matrix: constant matrices go
    through the characteristic polynomial, others through the spectral
    iteration."""
    d = len(Phi)
    consts = []
    all_const = True
    for row in Phi:
        crow = []
        for e in row:
            c = _constant_of_entry(e, config)
            if c is None:
                all_const = False
                break
            crow.append(c)
        if not all_const:
            break
        consts.append(crow)
    if all_const:
        if all(c.is_zero() for row in consts for c in row):
            raise SingularMatrix("zero Frobenius action on bounded space")
        return frobenius_slopes_special(consts, config)
    return frobenius_slopes_generic(Phi, config)


def _constant_of_entry(e, config):
    if isinstance(e, GenericCoefficient):
        if len(e.den.coeffs) == 1 and 0 in e.den.coeffs \
                and set(e.num.coeffs) <= {0}:
            c0 = e.num.coeffs.get(0, config.zero())
            return c0 / e.den.coeffs[0]
        return None
    # truncated series: constant iff only t^0 within the window
    if set(e.coeffs) <= {0}:
        return e.coeffs.get(0, config.zero())
    return None


# ---------------------------------------------------------------------
# Comparison checks
# ---------------------------------------------------------------------


class CheckReport:
    """Named boolean checks with witnesses."""

    __slots__ = ("label", "checks")

    def __init__(self, label=""):
        self.label = label
        self.checks = []

    def add(self, name, passed, witnesses=None):
        self.checks.append({"name": name, "pass": bool(passed),
                            "witnesses": witnesses or {}})

    @property
    def ok(self):
        return all(c["pass"] for c in self.checks)

    def __repr__(self):
        return "CheckReport(%r, ok=%s, %d checks)" % (self.label, self.ok,
                                                      len(self.checks))


def verify_ct(c_slopes, growth_report, lam_max, is_pbq):
    """Compare the shifted Frobenius filtration of the solution space
    with the growth filtration: containment everywhere, equality exactly
    when the bounded quotient is pure.

    c_slopes: slope multiset of the constant Frobenius matrix on the
    special solutions; growth_report: special growth filtration;
    lam_max: maximal generic Frobenius slope.
    """
    report = CheckReport(growth_report.kind)
    shifted = sorted(s + lam_max for s in c_slopes)
    base = sorted(set(growth_report.breakpoints) | set(shifted))
    lams = list(base)
    for a, b in zip(base, base[1:]):
        lams.append(a + Fraction(b - a, 2))
    lams.sort()
    table = []
    containment_ok = True
    equal_everywhere = True
    for lam in lams:
        dim_s = sum(1 for s in shifted if s <= lam)
        dim_sol = growth_report.dim_at(lam)
        eq = dim_s == dim_sol
        if dim_s > dim_sol:
            containment_ok = False
        if not eq:
            equal_everywhere = False
        table.append({"lambda": lam, "dim_frobenius": dim_s,
                      "dim_growth": dim_sol, "equal": eq})
    report.add("containment", containment_ok, {"table": table})
    report.add("equality_iff_pbq", equal_everywhere == bool(is_pbq),
               {"equal_everywhere": equal_everywhere, "is_pbq": is_pbq})
    strict = [row["lambda"] for row in table if not row["equal"]]
    report.checks[0]["witnesses"]["strict_at"] = strict
    return report


def semicontinuity_check(special_multiset, generic_multiset):
    """Special polygon lies on or above the generic one with the same
    endpoints."""
    rel = np_compare(newton_polygon(special_multiset),
                     newton_polygon(generic_multiset))
    return rel in ("equal", "above_same_endpoints"), rel
