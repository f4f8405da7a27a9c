"""Log-growth measurement from finite coefficient data.

The growth class of f = sum a_i t^i is the least lambda with
|a_i| = O(i^lambda).  From a finite window we bracket it: plot
(log_p i, -v(a_i)) for nonzero a_i, take the upper convex hull, and read

  upper = slope of the final hull segment,
  lower = slope of the chord from the hull vertex nearest x_max/2 to the
          last vertex (clamped to >= 0).

A factor of L = log t adds exactly 1 to the growth of its cofactor, and
the total is the max over L-degrees.  Brackets that close to within tol
around a small-denominator rational are snapped; a bracket of exact width
zero is marked exact.  All arithmetic is in exact rationals: the abscissa
log_p(i) is an exact integer at powers of p and otherwise a fixed-
denominator floor approximation, which cannot create spurious exactness
because exactness requires a zero-width bracket.
"""

from fractions import Fraction

from .errors import InsufficientSupport, RelationNotSatisfied
from .scalars import log_p_floor_frac
from .series import TruncatedLogSeries, TruncatedSeries

DEFAULT_SNAP_DENOMINATOR = 24
DEFAULT_TOL = Fraction(1, 50)
DEFAULT_WINDOW_START = 16


class GrowthEstimate:
    """Bracket [lower, upper] for a growth exponent."""

    __slots__ = ("lower", "upper", "exact", "snapped")

    def __init__(self, lower, upper, exact=False, snapped=False):
        self.lower = Fraction(lower)
        self.upper = Fraction(upper)
        self.exact = exact
        self.snapped = snapped

    @property
    def value(self):
        return self.upper

    def __repr__(self):
        return ("GrowthEstimate(lower=%s, upper=%s, exact=%s, snapped=%s)"
                % (self.lower, self.upper, self.exact, self.snapped))

    def __eq__(self, other):
        if isinstance(other, GrowthEstimate):
            return (self.lower, self.upper) == (other.lower, other.upper)
        if isinstance(other, (int, Fraction)):
            return self.lower == other and self.upper == other
        return NotImplemented


def upper_convex_hull(points):
    """Upper convex hull of exact rational points, left to right."""
    best = {}
    for x, y in points:
        if x not in best or y > best[x]:
            best[x] = y
    pts = sorted(best.items())
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # keep the chain concave: slope must strictly decrease
            if (y2 - y1) * (pt[0] - x2) <= (pt[1] - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def snap_rational(x, snap_denominator, tol):
    """Nearest rational with denominator <= snap_denominator, if within
    tol; otherwise None."""
    best = None
    for d in range(1, snap_denominator + 1):
        n = round(x * d)
        cand = Fraction(n, d)
        err = abs(x - cand)
        if err <= tol and (best is None or err < abs(x - best)):
            best = cand
    return best


def _bracket_from_points(points):
    """(lower, upper, tight) hull bracket; raises InsufficientSupport
    for < 2 hull points.  upper is the final hull-segment slope, lower
    the mid-to-end chord slope clamped into [0, upper]; tight means the
    two agreed before clamping (collinear late hull)."""
    hull = upper_convex_hull(points)
    # the envelope of an O(i^lambda) class is nondecreasing for
    # lambda >= 0: points past the hull's peak are spent support, so the
    # asymptotic slope is read at the first point attaining the peak
    # (a flat run at the peak height is spent support too)
    peak = max(range(len(hull)), key=lambda i: (hull[i][1], -hull[i][0]))
    hull = hull[:peak + 1]
    if len(hull) < 2:
        raise InsufficientSupport("fewer than 2 hull points")
    (xa, ya), (xb, yb) = hull[-2], hull[-1]
    upper = (yb - ya) / (xb - xa)
    xmid = hull[-1][0] / 2
    anchor = min(hull[:-1], key=lambda pt: abs(pt[0] - xmid))
    chord = (hull[-1][1] - anchor[1]) / (hull[-1][0] - anchor[0])
    tight = chord == upper
    lower = chord
    if lower < 0:
        lower = Fraction(0)
    if lower > upper:
        lower = upper
    if upper < 0:
        upper = Fraction(0)
    return lower, upper, tight


def measure_series_growth(s, window=None, snap_denominator=None, tol=None):
    """Growth bracket of a single TruncatedSeries (no log factor)."""
    lo, up, ex = _series_bracket(s, window)
    return _finish(lo, up, snap_denominator, tol, exact=ex)


def _series_bracket(s, window):
    """Returns (lower, upper, exact_flag_pre_snap) for one series part."""
    if s.is_zero():
        raise InsufficientSupport("zero series has growth -inf")
    p = s.config.p
    if all(c.valuation() >= 0 for c in s.coeffs.values()):
        return Fraction(0), Fraction(0), True
    if window is None:
        end = s.trunc if s.trunc is not None else s.degree()
        window = (DEFAULT_WINDOW_START, end)
    a, b = window
    pts = [(log_p_floor_frac(i, p), -c.valuation())
           for i, c in s.coeffs.items() if a <= i <= b and i >= 1]
    if sum(1 for _, y in pts if y > 0) == 0 or len(pts) < 2:
        # fall back to the full positive-index range
        pts = [(log_p_floor_frac(i, p), -c.valuation())
               for i, c in s.coeffs.items() if i >= 1]
    lo, up, tight = _bracket_from_points(pts)
    return lo, up, tight and lo == up


def _finish(lower, upper, snap_denominator, tol, exact=None):
    if snap_denominator is None:
        snap_denominator = DEFAULT_SNAP_DENOMINATOR
    if tol is None:
        tol = DEFAULT_TOL
    if exact is None:
        exact = (lower == upper)
    snapped = False
    if upper - lower <= tol:
        cand = snap_rational(upper, snap_denominator, tol)
        if cand is not None:
            if exact and upper != cand:
                exact = False
            lower = upper = cand
            snapped = True
    return GrowthEstimate(lower, upper, exact=exact, snapped=snapped)


def measure_log_growth(f, window=None, snap_denominator=None, tol=None):
    """Growth bracket of a TruncatedLogSeries: per-part hull brackets,
    shifted by the L-degree, combined by max."""
    if isinstance(f, TruncatedSeries):
        f = TruncatedLogSeries.from_series(f)
    if f.is_zero():
        raise InsufficientSupport("zero series has growth -inf")
    lo_best = up_best = None
    exact_all = True
    for n, s in f.parts.items():
        lo, up, ex = _series_bracket(s, window)
        lo, up = lo + n, up + n
        if up_best is None or up > up_best:
            up_best = up
        if lo_best is None or lo > lo_best:
            lo_best = lo
        exact_all = exact_all and ex
    if lo_best > up_best:
        lo_best = up_best
    return _finish(lo_best, up_best, snap_denominator, tol,
                   exact=exact_all and lo_best == up_best)


def exact_growth_via_eigenrelation(f, c, d, phi_t, window=None,
                                   snap_denominator=None, tol=None):
    """Exact growth of an eigenvector of the d-th Frobenius power.

    Verifies that g = phi^d(f) - c*f is zero on the window (or of
    strictly smaller measured growth than f); then the growth is exactly
    v(c) / (d * log_p q).
    """
    if isinstance(f, TruncatedSeries):
        f = TruncatedLogSeries.from_series(f)
    g = f
    for _ in range(d):
        g = g.frobenius_substitute(phi_t)
    g = g - f.scalar_mul(c)
    # compare on the common known window
    truncs = [s.trunc for s in list(f.parts.values()) + list(g.parts.values())
              if s.trunc is not None]
    if truncs:
        g = g.truncate(min(truncs))
    if not g.is_zero():
        est_f = measure_log_growth(f, window, snap_denominator, tol)
        try:
            est_g = measure_log_growth(g, window, snap_denominator, tol)
        except InsufficientSupport:
            est_g = None
        if est_g is not None and est_g.upper >= est_f.lower:
            raise RelationNotSatisfied(
                "phi^%d(f) - c f does not vanish or shrink (residual growth"
                " %r vs %r)" % (d, est_g, est_f))
    config = f.config
    lam = c.valuation() / (d * config.a)
    return GrowthEstimate(lam, lam, exact=True, snapped=True)
