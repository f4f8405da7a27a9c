"""Command-line front end: parse module documents, drive the pipelines,
emit deterministic reports (JSON, CSV solution dumps, SVG polygons)."""

import io
import json
import sys
from fractions import Fraction

import click

from .analysis import (CheckReport, b_nabla, frobenius_slopes_generic,
                       frobenius_slopes_special, gap_check,
                       growth_filtration_generic, growth_filtration_special,
                       newton_polygon, np_compare, pbq_test,
                       semicontinuity_check, verify_ct)
from .corpus import (CorpusOptions, default_special_depth, run_corpus,
                     DEFAULT_GENERIC_DEPTH)
from .errors import PadicGrowthError
from .modules import to_generic
from .solvers import solve_generic, solve_special, verify_package


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k) if isinstance(k, Fraction) else k: _jsonable(v)
                for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit(payload, fmt, out, svg=None, csv_text=None):
    payload = dict(payload)
    payload.setdefault("schema", 1)
    if fmt == "json":
        text = json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"
    elif fmt == "csv":
        if csv_text is None:
            raise click.UsageError("csv output is not defined for this verb")
        text = csv_text
    elif fmt == "svg":
        if svg is None:
            raise click.UsageError("svg output is not defined for this verb")
        text = svg
    else:
        raise click.UsageError("unknown format %r" % fmt)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _parse_window(text):
    if text is None:
        return None
    try:
        a, b = text.split("..")
        return (int(a), int(b))
    except ValueError:
        raise click.UsageError("--window expects a..b")


def _load(path, depth):
    from .dsl import parse_module_document
    with open(path, "r", encoding="utf-8") as fh:
        return parse_module_document(fh.read(), depth=depth)


def _polygon_svg(polys):
    """Static SVG of one or more Newton polygons (x in rank units, y in
    slope units)."""
    xs = [x for _, verts in polys for x, _ in verts]
    ys = [y for _, verts in polys for _, y in verts]
    xmax = max(xs) if xs else 1
    ylo, yhi = (min(ys), max(ys)) if ys else (0, 1)
    if yhi == ylo:
        yhi = ylo + 1
    w, h, pad = 400, 300, 30
    sx = Fraction(w - 2 * pad, max(xmax, 1))
    sy = Fraction(h - 2 * pad, yhi - ylo)
    buf = io.StringIO()
    buf.write('<svg xmlns="http://www.w3.org/2000/svg" width="%d" '
              'height="%d">\n' % (w, h))
    colors = ["black", "gray"]
    for idx, (name, verts) in enumerate(polys):
        pts = " ".join("%.2f,%.2f" % (pad + float(x * sx),
                                      h - pad - float((y - ylo) * sy))
                       for x, y in verts)
        buf.write('<polyline fill="none" stroke="%s" points="%s"><title>'
                  '%s</title></polyline>\n'
                  % (colors[idx % len(colors)], pts, name))
    buf.write("</svg>\n")
    return buf.getvalue()


def _solution_csv(S):
    lines = ["solution_index,basis_index,t_exponent,log_degree,"
             "valuation_numerator,valuation_denominator"]
    for i, row in enumerate(S.Y):
        for j, e in enumerate(row):
            for n in sorted(e.parts):
                s = e.parts[n]
                for d in sorted(s.coeffs):
                    c = s.coeffs[d]
                    if c.is_zero():
                        continue
                    v = c.valuation()
                    lines.append("%d,%d,%d,%d,%d,%d"
                                 % (i, j, d, n, v.numerator, v.denominator))
    return "\n".join(lines) + "\n"


def _common(f):
    f = click.option("--depth", type=int, default=None,
                     help="truncation depth / expansion length")(f)
    f = click.option("--window", default=None,
                     help="measurement window a..b")(f)
    f = click.option("--snap", type=int, default=None,
                     help="max denominator for slope snapping")(f)
    f = click.option("--tol", default=None,
                     help="snap tolerance (rational)")(f)
    f = click.option("--format", "fmt", default="json",
                     type=click.Choice(["json", "csv", "svg"]))(f)
    f = click.option("--out", default=None, type=click.Path())(f)
    return f


@click.group()
def main():
    """Exact-arithmetic pipelines for matrix-presented differential
    modules over p-adic power-series rings."""


@main.command()
@click.argument("input", type=click.Path(exists=True))
@_common
def validate(input, depth, window, snap, tol, fmt, out):
    """Structural and compatibility checks for a module document."""
    M = _load(input, depth)
    rep = M.validate()
    _emit({"label": M.label, "ok": rep.ok,
           "failures": [list(f) for f in rep.failures],
           "residual_order": rep.residual_order}, fmt, out)
    sys.exit(0 if rep.ok else 1)


@main.command()
@click.argument("input", type=click.Path(exists=True))
@_common
def solve(input, depth, window, snap, tol, fmt, out):
    """Fundamental solution at the special fiber."""
    M = _load(input, depth)
    d = depth if depth is not None else default_special_depth(M.config)
    S = solve_special(M, d)
    rep = verify_package(M, S)
    payload = {"label": M.label, "depth": d,
               "C": [[str(c) for c in row] for row in S.C],
               "residual_order": S.residual_order,
               "replay_ok": rep.ok}
    _emit(payload, fmt, out, csv_text=_solution_csv(S))


@main.command()
@click.argument("input", type=click.Path(exists=True))
@_common
def growth(input, depth, window, snap, tol, fmt, out):
    """Log-growth filtrations at both fibers."""
    M = _load(input, depth)
    win = _parse_window(window)
    tolf = Fraction(tol) if tol is not None else None
    d = depth if depth is not None else default_special_depth(M.config)
    S = solve_special(M, d)
    sp = growth_filtration_special(S, window=win, snap_denominator=snap,
                                   tol=tolf)
    Mg = to_generic(M, allow_truncated=True)
    E = solve_generic(Mg, depth if depth is not None
                      else DEFAULT_GENERIC_DEPTH)
    gen = growth_filtration_generic(E, A_E=Mg.A_E, window=win,
                                    snap_denominator=snap, tol=tolf)
    payload = {"label": M.label,
               "special": {"multiset": sp.slope_multiset,
                           "dims": sp.dims, "b_nabla": b_nabla(sp)},
               "generic": {"multiset": gen.slope_multiset,
                           "dims": gen.dims, "b_nabla": b_nabla(gen)}}
    svg = _polygon_svg([
        ("special", newton_polygon(sp.slope_multiset).vertices),
        ("generic", newton_polygon(gen.slope_multiset).vertices)])
    _emit(payload, fmt, out, svg=svg)


@main.command()
@click.argument("input", type=click.Path(exists=True))
@_common
def slopes(input, depth, window, snap, tol, fmt, out):
    """Frobenius slope multisets at both fibers."""
    M = _load(input, depth)
    d = depth if depth is not None else default_special_depth(M.config)
    S = solve_special(M, d)
    c_slopes = frobenius_slopes_special(S.C, M.config)
    Mg = to_generic(M, allow_truncated=True)
    frob = frobenius_slopes_generic(Mg.A_E, M.config, snap_denominator=snap)
    _emit({"label": M.label, "special_c_slopes": c_slopes,
           "generic_frobenius": frob}, fmt, out)


@main.command()
@click.argument("input", type=click.Path(exists=True))
@_common
def newton(input, depth, window, snap, tol, fmt, out):
    """Newton polygons (growth and Frobenius) with the gap check."""
    M = _load(input, depth)
    win = _parse_window(window)
    tolf = Fraction(tol) if tol is not None else None
    Mg = to_generic(M, allow_truncated=True)
    E = solve_generic(Mg, depth if depth is not None
                      else DEFAULT_GENERIC_DEPTH)
    gen = growth_filtration_generic(E, A_E=Mg.A_E, window=win,
                                    snap_denominator=snap, tol=tolf)
    frob = frobenius_slopes_generic(Mg.A_E, M.config, snap_denominator=snap)
    np_g = newton_polygon(gen.slope_multiset)
    np_f = newton_polygon(frob)
    payload = {"label": M.label,
               "growth_polygon": np_g.vertices,
               "frobenius_polygon": np_f.vertices,
               "gap_ok": gap_check(np_g)}
    svg = _polygon_svg([("growth", np_g.vertices),
                        ("frobenius", np_f.vertices)])
    _emit(payload, fmt, out, svg=svg)


@main.command()
@click.argument("input", type=click.Path(exists=True))
@_common
def check(input, depth, window, snap, tol, fmt, out):
    """Comparison checks: containment, equality locus, purity verdict,
    semicontinuity, gap bound."""
    M = _load(input, depth)
    win = _parse_window(window)
    tolf = Fraction(tol) if tol is not None else None
    d = depth if depth is not None else default_special_depth(M.config)
    S = solve_special(M, d)
    c_slopes = frobenius_slopes_special(S.C, M.config)
    sp = growth_filtration_special(S, window=win, snap_denominator=snap,
                                   tol=tolf)
    Mg = to_generic(M, allow_truncated=True)
    E = solve_generic(Mg, depth if depth is not None
                      else DEFAULT_GENERIC_DEPTH)
    gen = growth_filtration_generic(E, A_E=Mg.A_E, window=win,
                                    snap_denominator=snap, tol=tolf)
    frob = frobenius_slopes_generic(Mg.A_E, M.config, snap_denominator=snap)
    verdict = pbq_test(E, Mg.A_E, M.config, frob_slopes=frob, window=win,
                       snap_denominator=snap, tol=tolf, sol=gen)
    report = verify_ct(c_slopes, sp, max(frob), verdict.is_pbq)
    semi_ok, rel = semicontinuity_check(sp.slope_multiset,
                                        gen.slope_multiset)
    rep = CheckReport(M.label)
    rep.checks.extend(report.checks)
    rep.add("semicontinuity", semi_ok, {"relation": rel})
    rep.add("gap_bound", gap_check(newton_polygon(gen.slope_multiset)),
            {"multiset": gen.slope_multiset})
    rep.add("purity_of_bounded_quotient", True,
            {"is_pbq": verdict.is_pbq,
             "bounded_dim": verdict.bounded_solution_dim,
             "slopes": verdict.bounded_slope_multiset,
             "lambda_max": verdict.lambda_max_generic})
    _emit({"label": M.label, "ok": rep.ok, "checks": rep.checks}, fmt, out)
    sys.exit(0 if rep.ok else 1)


@main.command()
@_common
@click.option("--only", default=None, help="run a single entry by label")
def corpus(depth, window, snap, tol, fmt, out, only):
    """Run the worked-example corpus against its golden expectations."""
    opts = CorpusOptions(
        depth_special=depth,
        depth_generic=depth if depth is not None else None,
        window=_parse_window(window), snap_denominator=snap,
        tol=Fraction(tol) if tol is not None else None, only=only)
    bundle = run_corpus(opts)
    _emit(bundle, fmt, out)
    for entry in bundle["entries"]:
        status = "ok" if entry["ok"] else "FAIL"
        click.echo("%-24s %s" % (entry["label"], status), err=True)
        for d in entry["diffs"]:
            click.echo("    %s: expected %r, got %r"
                       % (d["key"], d["expected"], d["got"]), err=True)
    sys.exit(0 if bundle["ok"] else 1)


@main.command()
@click.argument("input", type=click.Path(exists=True))
@_common
def report(input, depth, window, snap, tol, fmt, out):
    """Full bundle: validation, solutions, filtrations, slopes, polygons,
    comparison checks."""
    M = _load(input, depth)
    win = _parse_window(window)
    tolf = Fraction(tol) if tol is not None else None
    d = depth if depth is not None else default_special_depth(M.config)
    rep = M.validate()
    S = solve_special(M, d)
    c_slopes = frobenius_slopes_special(S.C, M.config)
    sp = growth_filtration_special(S, window=win, snap_denominator=snap,
                                   tol=tolf)
    Mg = to_generic(M, allow_truncated=True)
    E = solve_generic(Mg, depth if depth is not None
                      else DEFAULT_GENERIC_DEPTH)
    gen = growth_filtration_generic(E, A_E=Mg.A_E, window=win,
                                    snap_denominator=snap, tol=tolf)
    frob = frobenius_slopes_generic(Mg.A_E, M.config, snap_denominator=snap)
    verdict = pbq_test(E, Mg.A_E, M.config, frob_slopes=frob, window=win,
                       snap_denominator=snap, tol=tolf, sol=gen)
    ct = verify_ct(c_slopes, sp, max(frob), verdict.is_pbq)
    payload = {
        "label": M.label,
        "validate": {"ok": rep.ok,
                     "failures": [list(f) for f in rep.failures]},
        "c_slopes": c_slopes,
        "special_growth": sp.slope_multiset,
        "generic_growth": gen.slope_multiset,
        "generic_frobenius": frob,
        "b_nabla": {"special": b_nabla(sp), "generic": b_nabla(gen)},
        "pbq": {"is_pbq": verdict.is_pbq,
                "slopes": verdict.bounded_slope_multiset},
        "np_compare": np_compare(newton_polygon(sp.slope_multiset),
                                 newton_polygon(gen.slope_multiset)),
        "gap_ok": gap_check(newton_polygon(gen.slope_multiset)),
        "checks": ct.checks,
    }
    _emit(payload, fmt, out)


def _excepthook(tp, value, tb):
    if issubclass(tp, PadicGrowthError):
        click.echo("error: %s: %s" % (tp.__name__, value), err=True)
        sys.exit(2)
    sys.__excepthook__(tp, value, tb)


sys.excepthook = _excepthook


if __name__ == "__main__":
    main()
