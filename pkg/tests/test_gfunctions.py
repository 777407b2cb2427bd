"""Exact G-function values, the xi kernel, and the explicit-estimate report."""
import math
from fractions import Fraction

import pytest

from primecusps.arith import build_context
from primecusps.gfunctions import (
    G_CONSTANT,
    GProfile,
    explicit_estimate_report,
    g_bracket,
    g_sifted,
    g_value,
    xi_value,
)


def test_g_small_values(ctx):
    assert g_value(ctx, 1, 1) == 1
    assert g_value(ctx, 1, Fraction(3, 2)) == 1
    assert g_value(ctx, 1, 3) == Fraction(5, 2)
    # sifted variant: z0=2 removes nothing
    for y in (1, 4, 10, 33):
        assert g_sifted(ctx, 1, y, 2) == g_value(ctx, 1, y)
    assert g_sifted(ctx, 1, 10, 3) == Fraction(23, 12)


def test_g_monotonicity(ctx):
    ys = [2, 5, 10, 40, 100]
    for d, z0 in ((1, 2), (1, 3), (7, 2), (6, 5)):
        vals = [g_sifted(ctx, d, y, z0) for y in ys]
        assert vals == sorted(vals)
    # more sifting or a larger coprimality modulus can only shrink the sum
    assert g_sifted(ctx, 1, 50, 3) >= g_sifted(ctx, 1, 50, 5)
    assert g_value(ctx, 1, 50) >= g_value(ctx, 6, 50)
    assert g_value(ctx, 3, 50) >= g_value(ctx, 15, 50)


def test_g_asymptotic_band(ctx):
    for z in (10 ** 3, 10 ** 4, 10 ** 5):
        g = float(g_value(ctx, 1, z))
        assert abs(g - math.log(z) - G_CONSTANT) <= 2.44 / math.sqrt(z)


def test_g_lower_bound_sampled(ctx):
    c = math.exp(-0.5772156649015329)
    for z0, z in ((2, 100), (3, 1000), (5, 317), (7, 10 ** 4), (11, 10 ** 5)):
        g = float(g_sifted(ctx, 1, z, z0))
        assert g >= c * math.log(z) / math.log(2 * z0)


def test_exact_vs_floating_profile(ctx):
    prof = GProfile(ctx, 1, 2, limit=3000)
    for y in (2, 10, 100, 999, 3000):
        exact = float(g_value(ctx, 1, y))
        assert abs(prof(y) - exact) <= 1e-12 * exact
    prof5 = GProfile(ctx, 7, 5, limit=500)
    for y in (10, 250, 500):
        exact = float(g_sifted(ctx, 7, y, 5))
        assert abs(prof5(y) - exact) <= 1e-12 * max(exact, 1.0)


def test_xi_values(ctx):
    for y in (1, Fraction(3, 2), 7, 100):
        assert xi_value(ctx, 1, y) == 1
    # below 1 even the trivial factorization is out of range
    assert xi_value(ctx, 1, Fraction(1, 2)) == 0
    for q in (2, 3, 6, 10, 30):
        assert xi_value(ctx, q, q) == Fraction(q, ctx.euler_phi(q))
        assert xi_value(ctx, q, 10 * q) == Fraction(q, ctx.euler_phi(q))
    for p in (2, 3, 5, 13):
        assert xi_value(ctx, p, p - 1) == 0
        # below 1 there is no admissible factorization at all
        assert xi_value(ctx, p, Fraction(1, 2)) == 0
    with pytest.raises(ValueError):
        xi_value(ctx, 12, 5)


def brute_force_bracket(ctx, q, z, z0, tau):
    """Direct quadruple loop over (q1, q2, q3, l)."""
    total = Fraction(0)
    P = ctx.primorial(z0)
    lmax = math.floor(z / math.sqrt(q)) if q > 1 else math.floor(z)
    for l in range(1, lmax + 1):
        if not ctx.is_squarefree(l):
            continue
        if math.gcd(l, q * tau * P) != 1:
            continue
        y = Fraction(z, l) if not isinstance(z, int) else Fraction(z, l)
        acc = Fraction(0)
        for q1 in range(1, q + 1):
            if q % q1:
                continue
            rest = q // q1
            for q3 in range(1, rest + 1):
                if rest % q3:
                    continue
                q2 = rest // q3
                if q1 * q3 <= y and q2 * q3 <= y:
                    phi2 = 1
                    for p in ctx.prime_factors(q3):
                        phi2 *= p - 2
                    acc += Fraction(ctx.mobius(q3) * phi2, ctx.euler_phi(q3))
        total += Fraction(1, ctx.euler_phi(l)) * acc
    return total


def test_g_bracket_identities(ctx):
    for z0, z, tau in ((2, 20, 1), (3, 50, 1), (2, 30, 7)):
        assert g_bracket(ctx, 1, z, z0, tau) == g_sifted(ctx, tau, z, z0)
    for p, z in ((3, 30), (7, 50)):
        lhs = g_bracket(ctx, p, z, 2, 1)
        rhs = Fraction(p, p - 1) * g_sifted(ctx, p, Fraction(z, p), 2)
        assert lhs == rhs


def test_g_bracket_brute_force(ctx):
    assert g_bracket(ctx, 6, 20, 2, 1) == brute_force_bracket(ctx, 6, 20, 2, 1)
    assert g_bracket(ctx, 10, 35, 2, 1) == brute_force_bracket(ctx, 10, 35, 2, 1)
    assert g_bracket(ctx, 15, 24, 2, 2) == brute_force_bracket(ctx, 15, 24, 2, 2)
    assert g_bracket(ctx, 35, 60, 3, 2) == brute_force_bracket(ctx, 35, 60, 3, 2)


def test_bracket_preconditions(ctx):
    with pytest.raises(ValueError):
        g_bracket(ctx, 4, 20, 2, 1)       # not squarefree
    with pytest.raises(ValueError):
        g_bracket(ctx, 3, 20, 2, 3)       # shares a prime with tau
    with pytest.raises(ValueError):
        g_bracket(ctx, 2, 20, 3, 1)       # q inside the small-prime block


def test_division_chain_exhaustive(ctx):
    # G_tau(z/q) <= (q/phi(q)) G_{q tau}(z/q) across small squarefree q
    for q in (2, 3, 6, 10, 15, 30):
        for z in (50, 200, 1000):
            lhs = g_sifted(ctx, 1, Fraction(z, q), 2)
            rhs = Fraction(q, ctx.euler_phi(q)) * \
                g_sifted(ctx, q, Fraction(z, q), 2)
            assert lhs <= rhs


def test_square_doubling(ctx):
    for z in range(2, 301):
        assert g_value(ctx, 1, z * z) <= 2 * g_value(ctx, 1, z)


def test_report_statuses(ctx):
    rows = explicit_estimate_report(ctx, 10_000)
    by_status = {}
    for r in rows:
        by_status.setdefault(r.status, []).append(r.lemma)
    # two stated estimates are measurably false and must stay red
    assert sorted(by_status.get("fail", [])) == [
        "mertens-product-lower-refined", "primorial-log-growth"]
    # gated rows must explain themselves
    for r in rows:
        if r.status == "not-applicable":
            assert r.note
    fails = {r.lemma: r for r in rows if r.status == "fail"}
    assert fails["primorial-log-growth"].margin == pytest.approx(
        -4.469522831748996, rel=1e-9)
    assert fails["mertens-product-lower-refined"].margin == pytest.approx(
        -0.0013525373530547669, rel=1e-9)


def test_report_passing_rows_have_margins(ctx):
    for r in explicit_estimate_report(ctx, 10_000):
        if r.status == "pass" and r.margin is not None:
            assert r.margin >= -1e-9
