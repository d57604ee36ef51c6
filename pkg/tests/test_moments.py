import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from elephant_lab import moments

F = Fraction
EXPONENTS = [F(11, 20), F(3, 5), F(7, 10), F(3, 4), F(4, 5), F(9, 10)]


def test_known_values_at_three_quarters():
    t = moments.m_sequence(F(3, 4), 4)
    assert t.m[1:] == [1, F(3, 2), F(7, 4), F(39, 16)]


@pytest.mark.parametrize("a", EXPONENTS + [F(1)])
def test_closed_forms(a):
    t = moments.m_sequence(a, 4)
    assert t.exact
    for k in range(1, 5):
        assert t.m[k] == moments.closed_form_m(a, k)


def test_float_recursion_agrees_with_exact():
    ex = moments.m_sequence(F(0.7), 40, prec=256)  # the binary value of the float
    fl = moments.m_sequence(0.7, 40, prec=256)
    for k in range(1, 41):
        assert abs(ex.m_mp(k) / fl.m_mp(k) - 1) < mpmath.mpf(10) ** -60


def test_rejects_subcritical():
    for a in (F(1, 2), F(2, 5), F(11, 10), 0.5):
        with pytest.raises(ValueError):
            moments.m_sequence(a, 3)


def test_low_moments_closed_forms():
    for a in (0.6, 0.75, 0.9):
        t = moments.m_sequence(a, 3, prec=128)
        assert abs(float(moments.moment_L1(t, 1)) - 1 / math.gamma(a + 1)) < 1e-14
        assert abs(float(moments.moment_L1(t, 2)) - 1 / ((2 * a - 1) * math.gamma(2 * a))) < 1e-13
        assert abs(float(moments.moment_L1(t, 3)) - (a + 1) / (a * (2 * a - 1) * math.gamma(3 * a))) < 1e-13


def test_mu4_at_three_quarters_is_rational():
    assert moments.moment_L1(moments.m_sequence(F(3, 4), 4), 4) == mpmath.mpf("9.75")


def test_first_step_mixture():
    t = moments.m_sequence(F(3, 4), 6)
    for k in range(7):
        assert moments.moment_Lq(t, 1, k) == moments.moment_L1(t, k)
        if k % 2:
            assert moments.moment_Lq(t, F(1, 2), k) == 0
        else:
            assert moments.moment_Lq(t, 0.9, k) == moments.moment_L1(t, k)


def test_mc_moments_agree(walk_d1_limit):
    t = moments.m_sequence(F(3, 4), 4)
    x = walk_d1_limit
    for k in range(1, 5):
        se = (x**k).std(ddof=1) / math.sqrt(x.size)
        assert abs((x**k).mean() - float(t.mu[k])) < 4 * se


def test_mgf_basic():
    t = moments.m_sequence(0.75, 60, prec=256)
    assert moments.mgf_L1(t, 0).value == 1
    with mpmath.workprec(256):
        small = moments.mgf_L1(t, mpmath.mpf("1e-8"), terms=1).value
        assert abs(small - (1 + mpmath.mpf("1e-8") / mpmath.gamma(1.75))) < mpmath.mpf(10) ** -15


def test_mgf_value_and_tail():
    t = moments.m_sequence(0.75, 60, prec=256)
    v = moments.mgf_L1(t, 1)
    assert v.converged and v.tail_bound < 1e-20
    assert abs(float(v.value) - 4.6035244422500308) < 1e-12


def test_mgf_against_mc(walk_d1_limit):
    t = moments.m_sequence(0.75, 60, prec=256)
    e = np.exp(walk_d1_limit)
    se = e.std(ddof=1) / math.sqrt(e.size)
    assert abs(e.mean() - float(moments.mgf_L1(t, 1).value)) < 4 * se


def test_mgf_mixture_symmetric():
    t = moments.m_sequence(0.75, 60, prec=256)
    half = moments.mgf_Lq(t, 0.5, 0.7).value
    assert abs(half - moments.mgf_Lq(t, 0.5, -0.7).value) < mpmath.mpf(10) ** -60


def test_mgf_tail_infinite_when_series_has_not_started_converging():
    t = moments.m_sequence(0.75, 3, prec=128)
    assert not moments.mgf_L1(t, 50).converged


def test_bound_trivial_orders():
    a = 0.75
    t = moments.m_sequence(a, 2)
    mu2 = float(t.mu[2])
    cert = moments.bound_check(a, 2, [math.sqrt(mu2), mu2])
    assert cert[0].holds and abs(cert[0].left - cert[0].right) < 1e-12
    # k = 2: E W^2 / 2 <= C^2 (2/a) / Gamma(2a+1), an identity-level check
    C2 = math.gamma(a + 1) ** 2 * mu2
    assert abs(cert[1].right - C2 * (2 / a) / math.gamma(2 * a + 1)) < 1e-12
    assert cert[1].holds


def test_bound_with_mc_moments(walk_d1_limit):
    absm = [np.mean(np.abs(walk_d1_limit) ** k) for k in range(1, 7)]
    certs = moments.bound_check(0.75, 6, absm)
    assert all(c.holds for c in certs)
    assert certs[5].margin > 0


def test_carleman_slope_and_monotone_sums():
    t = moments.m_sequence(0.75, 200, prec=256)
    r = moments.carleman_diagnostic(t, 100)
    assert abs(r.slope + 0.25) < 0.1
    assert np.all(np.diff(r.partial_sums) > 0)
    r2 = moments.carleman_diagnostic(t, 50)
    assert r.partial_sums[-1] > r2.partial_sums[-1]


def test_hankel_signs_show_m_is_not_a_moment_sequence():
    t = moments.m_sequence(F(3, 4), 20)
    signs = moments.hankel_signs(t, 10)
    assert signs[:3] == [1, 1, 1] and -1 in signs


def test_square_mgf_ratios_decay_for_small_t():
    t = moments.m_sequence(0.75, 80, prec=256)
    r = moments.square_mgf_ratios(t, 0.01)
    assert r[-1] < 1


def test_table_exports(tmp_path):
    t = moments.m_sequence(F(3, 4), 4)
    rows = t.to_csv(tmp_path / "m.csv").read_text().splitlines()
    assert rows[0] == "k,m_numerator,m_denominator,m,mu"
    assert rows[4].startswith("4,39,16,")
    assert '"K": 4' in t.to_json(tmp_path / "m.json").read_text()
