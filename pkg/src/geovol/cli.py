"""Command-line front end.

Every subcommand prints one JSON (or CSV) document.  The exit status is 0
when all emitted checks pass, 1 when any check fails and 2 on usage or
input errors.  Run ``geovol <subcommand> --help`` for the options.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__
from . import catalog, checks, seifert
from .expr import ExprError, derivative, evaluate, free_variables, parse_expr, to_text
from .forms import ScalarField, ext_d, wedge
from .integrate import QuadratureSpec, integrate_form
from .report import CSV_FIELDS, CheckReport, encode_value, reports_to_csv_rows
from .riemannian import pullback_metric

__all__ = ["main", "run", "build_parser", "UsageError"]

DEFAULT_ORDER = 32


class UsageError(Exception):
    """Bad input that argparse could not catch (exit status 2)."""


class Outcome:
    """Collects result values, their provenance and the check reports."""

    def __init__(self):
        self.values = {}
        self.provenance = {}
        self.reports = []
        self.info = {}

    def exact(self, key, value):
        self.values[key] = encode_value(value)
        self.provenance[key] = "exact"

    def numeric(self, key, result):
        self.values[key] = encode_value(result.value)
        entry = {"method": result.provenance, "error_estimate": encode_value(result.error_estimate)}
        if result.truncation_error is not None:
            entry["truncation_error"] = encode_value(result.truncation_error)
        self.provenance[key] = entry

    def pointwise(self, key, value):
        self.values[key] = encode_value(value)
        self.provenance[key] = "pointwise"

    def add(self, report: CheckReport):
        self.reports.append(report)


# ---------------------------------------------------------------------------
# helpers


def _int_list(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _spec(args, default_order: int = DEFAULT_ORDER) -> QuadratureSpec:
    if args.mc_samples:
        return QuadratureSpec.monte_carlo(args.mc_samples, args.seed, args.workers)
    return QuadratureSpec.gauss_legendre(args.order or default_order, args.workers)


def _tol(args, default: float) -> float:
    return default if args.tol is None else args.tol


def _profile(text: str, var: str):
    """Parse an expression and return value, first and second derivative callables."""
    node = parse_expr(text)
    free = free_variables(node)
    if free and free != {var}:
        raise UsageError(f"expression {text!r} must use the variable {var!r}, found {sorted(free)}")
    d1 = derivative(node, var)
    d2 = derivative(d1, var)
    return (lambda x: evaluate(node, x)), (lambda x: evaluate(d1, x)), (lambda x: evaluate(d2, x)), (node, d1, d2)


def _write_plot(path: str, header: tuple, columns):
    if not path:
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([repr(float(v)) for v in row])


# ---------------------------------------------------------------------------
# subcommands


def cmd_identity(args, out: Outcome):
    tol = _tol(args, 1e-8)
    skipped = []
    for dim in args.dim:
        for n in args.n:
            if dim < 2 * n + 1:
                skipped.append(f"dim={dim}, n={n}")
                continue
            worst = 0.0
            for seed in range(args.seeds):
                base = 1000 * seed
                a = checks.random_polynomial_form(checks.RandomFormSpec(dim, 1, args.poly_degree, seed=base + 1))
                b = checks.random_polynomial_form(checks.RandomFormSpec(dim, 1, args.poly_degree, seed=base + 2))
                pts = a.chart.sample(args.points, seed=base + 3)
                worst = max(worst, checks.abbondandolo_residual(a, b, n, pts, relative=True))
            out.add(CheckReport(f"identity_dim{dim}_n{n}", worst, 0.0, tol,
                                detail=f"max relative residual over {args.seeds} seeds x {args.points} points",
                                provenance="pointwise"))
    if skipped:
        out.info["skipped"] = skipped


def cmd_hopf(args, out: Outcome):
    if args.what == "volume":
        _, X, alpha = catalog.hopf_bundle()
        res = integrate_form(wedge(alpha, ext_d(alpha)), catalog.hopf_chain(), _spec(args))
        out.numeric("vol", res)
        tol = _tol(args, 1e-8 if not args.mc_samples else max(1e-8, 4 * res.error_estimate))
        out.add(CheckReport("hopf_volume", res.value, 1.0, tol, detail="integral of alpha ^ d alpha over S^3",
                            provenance=res.provenance))
    elif args.what == "section":
        spec = _spec(args, default_order=catalog.SECTION_SPEC.order)
        res = catalog.hopf_curvature_integral(args.r_max, spec)
        out.numeric("curvature_integral", res)
        out.add(CheckReport("hopf_section", res.value, 1.0, _tol(args, 1e-5),
                            detail=f"truncated at R = {args.r_max:g}; tail bound {res.truncation_error:.3g}",
                            provenance=res.provenance))
    else:
        S = seifert.SeifertData(0, ((1, 1),))
        e = seifert.euler_number(S)
        out.exact("euler", e)
        out.exact("vol", seifert.vol_from_seifert(S))
        out.add(CheckReport("hopf_euler", e, Fraction(-1), 0, detail=f"Seifert invariants {S}"))


def cmd_seifert(args, out: Outcome):
    try:
        text = sys.stdin.read() if args.json == "-" else open(args.json).read()
        S = seifert.SeifertData.from_json(text)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read Seifert data: {exc}")
    m, product = seifert.integrality_certificate(S)
    out.exact("euler", seifert.euler_number(S))
    out.exact("vol", seifert.vol_from_seifert(S))
    out.exact("m", m)
    out.add(CheckReport("integrality", product.denominator, 1, 0, detail=f"m * vol = {product}"))


def _orbifold(args) -> seifert.Orbifold2D:
    try:
        return seifert.Orbifold2D(args.genus, tuple(args.cones))
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_orbifold(args, out: Outcome):
    O = _orbifold(args)
    chi = seifert.chi_orb(O)
    stb = seifert.stb_invariants(O)
    out.exact("chi_orb", chi)
    out.values["stb_invariants"] = stb.to_json()
    out.provenance["stb_invariants"] = "exact"
    out.exact("euler_stb", seifert.euler_number(stb))
    out.add(CheckReport("stb_cross_check", seifert.euler_number(stb), chi, 0,
                        detail=f"euler number of {stb} against chi_orb"))


def _zeros(text: str) -> list:
    zeros = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        try:
            a, k = item.split(":")
            zeros.append(seifert.ZeroDatum(int(a), int(k)))
        except ValueError:
            raise UsageError(f"zero {item!r} is not of the form order:k")
    return zeros


def cmd_poincare_hopf(args, out: Outcome):
    O = _orbifold(args)
    try:
        rep = seifert.poincare_hopf_check(O, _zeros(args.zeros))
    except ValueError as exc:
        raise UsageError(str(exc))
    out.exact("index_sum", rep.computed)
    out.exact("chi_orb", rep.expected)
    out.add(rep)


def cmd_gauss_bonnet(args, out: Outcome):
    f, df, d2f, nodes = _profile(args.profile, "r")
    try:
        P = catalog.RevolutionProfile(f, df, d2f, args.length, args.alpha1, args.alpha2, label=args.profile)
    except ValueError as exc:
        raise UsageError(str(exc))
    rep = catalog.gauss_bonnet_revolution(P, _spec(args), tolerance=_tol(args, 1e-8))
    out.values["total_curvature"] = encode_value(rep.computed)
    out.provenance["total_curvature"] = rep.provenance
    out.exact("chi_orb", seifert.chi_orb(P.orbifold()))
    out.info["second_derivative"] = to_text(nodes[2])
    out.add(rep)
    if args.plot_data:
        r = np.linspace(0.0, args.length, 201)[1:-1]
        _write_plot(args.plot_data, ("r", "f", "K"), (r, f(r), -d2f(r) / f(r)))


def cmd_disc(args, out: Outcome):
    Hf, dH, d2H, nodes = _profile(args.H, "u")
    try:
        H = catalog.HProfile(Hf, dH, d2H, label=args.H)
    except ValueError as exc:
        raise UsageError(str(exc))
    spec = _spec(args)
    methods = ("direct", "return_time") if args.method == "both" else (args.method.replace("-", "_"),)
    results = {m: catalog.disc_volume(H, m, spec) for m in methods}
    for m, res in results.items():
        out.numeric(f"vol_{m}", res)
    c = catalog.disc_contact(H)
    out.add(checks.geodesibility_residual(c.alpha, c.X, c.chart.sample(200, seed=args.seed)))
    if len(results) == 2:
        a, b = results["direct"], results["return_time"]
        out.add(CheckReport("disc_agreement", a.value, b.value, _tol(args, 1e-6),
                            detail="direct against return-time volume", provenance=a.provenance))
    if args.plot_data:
        r = np.linspace(0.0, 1.0, 201)
        _write_plot(args.plot_data, ("r", "tau"), (r, H.tau(r * r)))


def cmd_beltrami(args, out: Outcome):
    try:
        fam = catalog.beltrami_family(args.a1, args.a2)
    except ValueError as exc:
        raise UsageError(str(exc))
    pts = fam.chart.sample(200, seed=args.seed)
    wanted = args.check
    if "pullback" in wanted:
        pm = pullback_metric(catalog.beltrami_map(args.a1, args.a2), catalog.round_metric())
        x = pts[:100]
        diff = float(np.max(np.abs(fam.g(x) - pm(x))))
        out.add(CheckReport("beltrami_pullback", diff, 0.0, _tol(args, 1e-8),
                            detail="closed-form metric against pullback of the round metric, 100 points",
                            provenance="pointwise"))
    if "geodesible" in wanted:
        X = fam.X1.scaled(ScalarField(fam.chart, lambda x: 1.0 / np.sqrt(fam.L2.scalar(x))))
        rep = checks.geodesibility_residual(fam.alpha, X, pts, tolerance=_tol(args, 1e-5))
        out.add(rep)
    if "contact" in wanted:
        vol = wedge(fam.alpha, ext_d(fam.alpha))(pts)[..., 0]
        # informational: the sign and size of alpha ^ d alpha, not a check
        out.pointwise("contact_min_abs", float(np.min(np.abs(vol))))
        out.info["contact_sign_constant"] = bool(np.all(vol > 0) or np.all(vol < 0))


def cmd_cartan(args, out: Outcome):
    chart, a, b, c = catalog.quaternionic_coframe()
    pts = chart.sample(100, seed=args.seed)
    wanted = args.check
    if "residual" in wanted:
        out.add(checks.cartan_residual(b, c, pts, tolerance=_tol(args, 1e-8)))
    if "alpha" in wanted:
        sol = checks.cartan_solve_alpha(b, c, pts)
        two_a = 2.0 * a(pts)
        s = 1 if np.sum(sol * two_a) >= 0 else -1
        out.exact("alpha_sign", s)
        out.add(CheckReport("cartan_alpha", float(np.max(np.abs(sol - 2.0 * a(pts)))), 0.0, _tol(args, 1e-8),
                            detail=f"solved alpha against 2a at 100 points; observed sign {s:+d}",
                            provenance="pointwise"))
    if "bott" in wanted:
        alpha = checks.cartan_alpha_form(b, c)
        X = checks.common_kernel_field(b, c, alpha)
        rep = checks.bott_relation(b, c, X, catalog.hopf_chain(), _spec(args), tolerance=_tol(args, 1e-8))
        out.values["bott"] = encode_value(rep.computed)
        out.values["vol"] = encode_value(-rep.expected.real)
        out.provenance["bott"] = out.provenance["vol"] = rep.provenance
        out.add(rep)


# ---------------------------------------------------------------------------
# parser


def _choices_list(choices):
    def parse(text):
        items = [t.strip() for t in text.split(",") if t.strip()]
        for t in items:
            if t not in choices:
                raise argparse.ArgumentTypeError(f"invalid choice {t!r} (choose from {', '.join(choices)})")
        return items
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("numerics and output")
    g.add_argument("--order", type=int, default=None,
                   help=f"Gauss-Legendre order per axis (default {DEFAULT_ORDER}; 64 for hopf --what section)")
    g.add_argument("--mc-samples", type=int, default=0, help="use Monte Carlo with this many samples (default: off)")
    g.add_argument("--seed", type=int, default=0, help="seed for Monte Carlo and sample points (default 0)")
    g.add_argument("--workers", type=int, default=1, help="worker threads for integrand evaluation (default 1)")
    g.add_argument("--tol", type=float, default=None, help="override the check tolerance")
    g.add_argument("--format", choices=("json", "csv"), default="json", help="output format (default json)")
    g.add_argument("-o", "--output", default=None, help="write output to this file instead of stdout")
    g.add_argument("--plot-data", default=None, metavar="CSV",
                   help="write (x, y) sample tables as CSV where the subcommand has any")

    p = argparse.ArgumentParser(prog="geovol", description="Volumes and invariants of geodesible vector fields.",
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text,
                            formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        sp.set_defaults(func=func)
        return sp

    sp = add("identity", cmd_identity, "difference identity for alpha ^ (d alpha)^n on random polynomial forms")
    sp.add_argument("--dim", type=_int_list, default=[3, 5], help="comma-separated chart dimensions")
    sp.add_argument("--n", type=_int_list, default=[0, 1, 2], help="comma-separated exponents n")
    sp.add_argument("--seeds", type=int, default=50, help="number of random form pairs")
    sp.add_argument("--points", type=int, default=20, help="sample points per pair")
    sp.add_argument("--poly-degree", type=int, default=2, help="total degree of the coefficient polynomials")

    sp = add("hopf", cmd_hopf, "Hopf fibration: volume, curvature of a section, Euler number")
    sp.add_argument("--what", choices=("volume", "section", "euler"), default="volume")
    sp.add_argument("--r-max", type=_positive_float, default=1.0e3, help="truncation radius for --what section")

    sp = add("seifert", cmd_seifert, "Euler number, volume and integrality for Seifert invariants")
    sp.add_argument("--json", required=True, metavar="FILE",
                    help='JSON {"genus": g, "pairs": [[a, b], ...]}; "-" reads stdin')

    for name, func, text in (("orbifold", cmd_orbifold, "orbifold Euler characteristic and unit tangent bundle"),
                             ("poincare-hopf", cmd_poincare_hopf, "index sum of a vector field against chi_orb")):
        sp = add(name, func, text)
        sp.add_argument("--genus", type=int, default=0)
        sp.add_argument("--cones", type=_int_list, default=[], help="comma-separated cone orders")
        if name == "poincare-hopf":
            sp.add_argument("--zeros", default="", help='zeros as "order:k,..." (order 1 = smooth point)')

    sp = add("gauss-bonnet", cmd_gauss_bonnet, "total curvature of a surface of revolution with cone points")
    sp.add_argument("--profile", required=True, help="profile f(r), e.g. 'sin(r)'")
    sp.add_argument("--length", type=_positive_float, default=math.pi)
    sp.add_argument("--alpha1", type=int, default=1, help="cone order at r = 0")
    sp.add_argument("--alpha2", type=int, default=1, help="cone order at r = length")

    sp = add("disc", cmd_disc, "volume of the Reeb flow of H(r^2) dtheta + r^2/2 dphi")
    sp.add_argument("--H", required=True, help="H as a function of u = r^2, e.g. '2-u'")
    sp.add_argument("--method", choices=("direct", "return-time", "both"), default="both")

    sp = add("beltrami", cmd_beltrami, "Beltrami metric family on S^3")
    sp.add_argument("--a1", type=_positive_float, default=1.2)
    sp.add_argument("--a2", type=_positive_float, default=0.8)
    sp.add_argument("--check", type=_choices_list(("pullback", "geodesible", "contact")),
                    default=["pullback", "geodesible"], help="comma-separated: pullback, geodesible, contact")

    sp = add("cartan", cmd_cartan, "Cartan structure of the quaternionic coframe and the Bott invariant")
    sp.add_argument("--check", type=_choices_list(("residual", "alpha", "bott")),
                    default=["residual", "alpha", "bott"], help="comma-separated: residual, alpha, bott")
    return p


def _config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def render(args, out: Outcome) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in reports_to_csv_rows(out.reports):
            w.writerow(row)
        return buf.getvalue()
    doc = {"tool_version": __version__, "command": args.command, "config": _config(args)}
    doc.update(out.values)
    doc["provenance"] = out.provenance
    if out.info:
        doc["info"] = out.info
    doc["reports"] = [r.to_dict() for r in out.reports]
    doc["metadata"] = {"timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    return json.dumps(doc, indent=2) + "\n"


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Outcome()
    try:
        args.func(args, out)
    except (UsageError, ExprError) as exc:
        print(f"geovol {args.command}: error: {exc}", file=sys.stderr)
        return 2
    text = render(args, out)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r.passed for r in out.reports) else 1


def main():
    sys.exit(run())
