"""One test per acceptance criterion; a PASS/FAIL line for each is printed in
the "acceptance criteria" section of the pytest terminal summary."""

import json
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from geovol.catalog import (HOPF_CHART, HProfile, RevolutionProfile, beltrami_family, beltrami_map,
                            disc_volume, gauss_bonnet_revolution, hopf_bundle, hopf_chain,
                            hopf_curvature_integral, hopf_perturbation, quaternionic_coframe,
                            round_metric)
from geovol.checks import (RandomFormSpec, abbondandolo_residual, bott_relation, cartan_alpha_form,
                           cartan_residual, cartan_solve_alpha, common_kernel_field,
                           geodesibility_residual, random_polynomial_form, volume_invariance)
from geovol.cli import run
from geovol.expr import derivative, evaluate, parse_expr
from geovol.forms import ScalarField, ext_d, interior
from geovol.riemannian import pullback_metric
from geovol.seifert import (Orbifold2D, SeifertData, ZeroDatum, chi_orb, euler_number,
                            integrality_certificate, poincare_hopf_check, stb_invariants)


def cli_json(capsys, *argv):
    code = run(list(argv))
    out, _ = capsys.readouterr()
    return code, json.loads(out)


@pytest.mark.acceptance(1, "Hopf volume")
def test_criterion_01_hopf_volume(capsys, record_property):
    t0 = time.perf_counter()
    code, doc = cli_json(capsys, "hopf", "--what", "volume", "--order", "32")
    elapsed = time.perf_counter() - t0
    record_property("detail", f"vol = {doc['vol']!r}, |vol - 1| = {abs(doc['vol'] - 1):.2e}, {elapsed:.2f} s")
    assert code == 0
    assert abs(doc["vol"] - 1.0) <= 1e-8
    assert elapsed < 5.0


@pytest.mark.acceptance(2, "Hopf section curvature integral")
def test_criterion_02_section_integral(record_property):
    res = hopf_curvature_integral(r_max=1.0e3)
    record_property("detail", f"value = {res.value!r}, truncation bound = {res.truncation_error:.3g}, "
                              f"quadrature estimate = {res.error_estimate:.2g}")
    assert abs(res.value - 1.0) <= 1e-5
    assert res.truncation_error is not None and res.truncation_error > 0


def random_seifert(rng):
    pairs = []
    while len(pairs) < 10:
        a, b = rng.randint(1, 50), rng.randint(-500, 500)
        if math.gcd(a, b) == 1:
            pairs.append((a, b))
    return SeifertData(rng.randint(0, 5), tuple(pairs))


@pytest.mark.acceptance(3, "Seifert exactness")
def test_criterion_03_seifert_exactness(record_property):
    e1 = euler_number(SeifertData(0, ((1, 1),)))
    e2 = euler_number(SeifertData(0, ((2, 1), (3, 1), (5, 1))))
    rng = random.Random(2024)
    data = [random_seifert(rng) for _ in range(10_000)]
    t0 = time.perf_counter()
    failures = 0
    for S in data:
        m, product = integrality_certificate(S)
        if not (isinstance(product, Fraction) and product.denominator == 1):
            failures += 1
    elapsed = time.perf_counter() - t0
    record_property("detail", f"e = {e1}, {e2}; {failures} integrality failures in 10^4, {elapsed:.2f} s")
    assert e1 == -1 and isinstance(e1, Fraction)
    assert e2 == Fraction(-31, 30)
    assert failures == 0
    assert elapsed < 1.0


@pytest.mark.acceptance(4, "STB cross-check identity")
def test_criterion_04_stb_cross_check(record_property):
    rng = random.Random(7)
    failures = 0
    for _ in range(1000):
        O = Orbifold2D(rng.randint(0, 5), tuple(rng.randint(2, 12) for _ in range(rng.randint(0, 6))))
        if euler_number(stb_invariants(O)) != chi_orb(O):
            failures += 1
    record_property("detail", f"{failures} failures in 10^3 random orbifolds")
    assert failures == 0


@pytest.mark.acceptance(5, "Difference identity suite")
def test_criterion_05_identity_suite(record_property):
    t0 = time.perf_counter()
    worst = 0.0
    combos = [(dim, n) for dim in (3, 5) for n in (0, 1, 2) if dim >= 2 * n + 1]
    for dim, n in combos:
        for seed in range(50):
            a_spec, b_spec = RandomFormSpec(dim, 1, seed=seed), RandomFormSpec(dim, 1, seed=seed + 10_000)
            chart = a_spec.chart()
            a, b = random_polynomial_form(a_spec, chart), random_polynomial_form(b_spec, chart)
            pts = chart.sample(20, seed=seed)
            worst = max(worst, abbondandolo_residual(a, b, n, pts, relative=True))
    elapsed = time.perf_counter() - t0
    record_property("detail", f"max relative residual {worst:.2e} over (dim, n) = {combos}, {elapsed:.1f} s")
    assert worst < 1e-8
    assert elapsed < 30.0


@pytest.mark.acceptance(6, "Volume invariance")
def test_criterion_06_volume_invariance(record_property):
    _, X, alpha = hopf_bundle()
    rep = volume_invariance(alpha, hopf_perturbation(), X, hopf_chain())
    record_property("detail", f"int alpha ^ dalpha = {rep.computed!r}, int beta ^ dbeta = {rep.expected!r}")
    assert abs(rep.computed - rep.expected) <= 1e-6
    assert abs(rep.computed - 1.0) <= 1e-6 and abs(rep.expected - 1.0) <= 1e-6


def profile_from_text(text):
    e = parse_expr(text)
    d1 = derivative(e)
    d2 = derivative(d1)
    return HProfile(lambda u: evaluate(e, u), lambda u: evaluate(d1, u), lambda u: evaluate(d2, u), text)


@pytest.mark.acceptance(7, "Disc example")
def test_criterion_07_disc(record_property):
    closed = {"1": math.pi, "2-u": 2 * math.pi}
    parts = []
    for text in ("1", "2-u", "1+u^2/8"):
        H = profile_from_text(text)
        direct, rt = disc_volume(H, "direct").value, disc_volume(H, "return_time").value
        parts.append(f"{text}: |diff| {abs(direct - rt):.1e}")
        assert abs(direct - rt) <= 1e-6
        if text in closed:
            assert abs(direct - closed[text]) <= 1e-8 and abs(rt - closed[text]) <= 1e-8
    record_property("detail", "; ".join(parts))


@pytest.mark.acceptance(8, "Gauss-Bonnet of revolution")
def test_criterion_08_gauss_bonnet(record_property):
    sphere = RevolutionProfile(np.sin, np.cos, lambda r: -np.sin(r), math.pi)
    # f = A sin r + B sin(2r)/2 with A + B = 1/2, B - A = -1/3
    A, B = 5 / 12, 1 / 12
    football = RevolutionProfile(lambda r: A * np.sin(r) + B * np.sin(2 * r) / 2,
                                 lambda r: A * np.cos(r) + B * np.cos(2 * r),
                                 lambda r: -A * np.sin(r) - 2 * B * np.sin(2 * r), math.pi, 2, 3)
    r1 = gauss_bonnet_revolution(sphere, tolerance=1e-8)
    r2 = gauss_bonnet_revolution(football, tolerance=1e-6)
    record_property("detail", f"sphere {r1.computed!r}, football {r2.computed!r}")
    assert abs(r1.computed - 4 * math.pi) <= 1e-8 and r1.passed
    assert abs(r2.computed - 5 * math.pi / 3) <= 1e-6 and r2.passed
    assert r1.expected == 2 * math.pi * float(chi_orb(sphere.orbifold())) and chi_orb(sphere.orbifold()) == 2
    assert r2.expected == 2 * math.pi * float(chi_orb(football.orbifold()))
    assert chi_orb(football.orbifold()) == Fraction(5, 6)


@pytest.mark.acceptance(9, "Poincare-Hopf")
def test_criterion_09_poincare_hopf(record_property):
    reports = [
        poincare_hopf_check(Orbifold2D(0), [ZeroDatum(1, 0), ZeroDatum(1, 0)]),
        poincare_hopf_check(Orbifold2D(0, (2, 3)), [ZeroDatum(2, 0), ZeroDatum(3, 0)]),
        poincare_hopf_check(Orbifold2D(1), []),
    ]
    record_property("detail", ", ".join(f"{r.computed} = {r.expected}" for r in reports))
    for r in reports:
        assert r.passed and r.tolerance == 0 and isinstance(r.computed, Fraction)
        assert r.computed == r.expected


@pytest.mark.acceptance(10, "Beltrami family")
def test_criterion_10_beltrami(record_property):
    fam = beltrami_family(1.2, 0.8)
    pts = HOPF_CHART.sample(100, seed=0)
    ref = pullback_metric(beltrami_map(1.2, 0.8), round_metric())
    diff = float(np.max(np.abs(fam.g(pts) - ref(pts))))
    X = fam.X1.scaled(ScalarField(fam.chart, lambda x: 1.0 / np.sqrt(fam.L2.scalar(x))))
    geo = geodesibility_residual(fam.alpha, X, HOPF_CHART.sample(200, seed=1), tolerance=1e-5)
    record_property("detail", f"metric diff {diff:.2e}, geodesibility residual {geo.computed:.2e}")
    assert diff < 1e-8
    assert geo.computed < 1e-5


@pytest.mark.acceptance(11, "Cartan structure and Bott relation")
def test_criterion_11_cartan_bott(record_property):
    _, a, b, c = quaternionic_coframe()
    pts = HOPF_CHART.sample(100, seed=0)
    res = cartan_residual(b, c, pts)
    alpha_dev = float(np.max(np.abs(cartan_solve_alpha(b, c, pts) - 2.0 * a(pts))))
    alpha = cartan_alpha_form(b, c)
    bott = bott_relation(b, c, common_kernel_field(b, c, alpha), hopf_chain())
    gap = abs(bott.computed - bott.expected)
    record_property("detail", f"residual {res.computed:.1e}, |alpha - 2a| {alpha_dev:.1e}, "
                              f"Bott {bott.computed.real:.10g} vs -vol {bott.expected.real:.10g} (gap {gap:.1e})")
    assert res.computed < 1e-8
    assert alpha_dev < 1e-8
    assert bott.computed.imag == 0.0
    assert gap < 1e-8


@pytest.mark.acceptance(12, "Determinism")
def test_criterion_12_determinism(capsys, record_property):
    runs = [
        ["hopf", "--what", "volume", "--mc-samples", "20000", "--seed", "5"],
        ["disc", "--H", "1+u^2/8", "--seed", "3"],
        ["identity", "--dim", "3", "--n", "1", "--seeds", "4", "--points", "5", "--seed", "11"],
    ]
    for argv in runs:
        texts = []
        for _ in range(2):
            run(argv)
            doc = json.loads(capsys.readouterr().out)
            assert "timestamp" in doc.pop("metadata")
            texts.append(json.dumps(doc, indent=2))
        assert texts[0] == texts[1], argv
    record_property("detail", f"{len(runs)} commands byte-identical across reruns (metadata stripped)")
