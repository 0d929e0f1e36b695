"""Eisenstein expansions, the lattice-sum bridge, and weight checks."""
from __future__ import annotations

import cmath
import math
import random
from fractions import Fraction

import pytest

from ellforge.modforms import (
    Lattice,
    act,
    bernoulli,
    check_weight,
    delta_q,
    divisor_sigma,
    eisenstein_lattice,
    eisenstein_num,
    eisenstein_q,
    g2_anomaly_samples,
    g2_lattice,
    lattice_value,
    qpochhammer,
    random_lattice,
)


def test_bernoulli_oracle():
    want = {
        0: Fraction(1),
        1: Fraction(-1, 2),
        2: Fraction(1, 6),
        4: Fraction(-1, 30),
        6: Fraction(1, 42),
        8: Fraction(-1, 30),
        12: Fraction(-691, 2730),
    }
    for n, v in want.items():
        assert bernoulli(n) == v
    assert bernoulli(3) == 0 and bernoulli(9) == 0


def test_divisor_sigma_oracle():
    assert divisor_sigma(1, 6) == 12
    assert divisor_sigma(3, 4) == 73
    assert divisor_sigma(7, 2) == 129
    assert divisor_sigma(0, 12) == 6


def test_g4_expansion():
    g4 = eisenstein_q(4, 5)
    assert g4.coeff(0) == Fraction(1, 240)
    assert [g4.coeff(n) for n in range(1, 6)] == [1, 9, 28, 73, 126]
    # normalization pin: first coefficient over constant term
    assert g4.coeff(1) / g4.coeff(0) == 240


def test_g2_g6_g8_expansions():
    g2 = eisenstein_q(2, 4)
    assert g2.coeff(0) == Fraction(-1, 24)
    assert [g2.coeff(n) for n in range(1, 5)] == [1, 3, 4, 7]
    g6 = eisenstein_q(6, 3)
    assert g6.coeff(0) == Fraction(-1, 504)
    assert [g6.coeff(n) for n in range(1, 4)] == [1, 33, 244]
    g8 = eisenstein_q(8, 2)
    assert g8.coeff(0) == Fraction(1, 480)
    assert g8.coeff(2) == 129


def test_pochhammer_pentagonal():
    p = qpochhammer(7)
    assert {e: c for e, c in p.coeffs.items()} == {0: 1, 1: -1, 2: -1, 5: 1, 7: 1}


def test_delta_coefficients():
    d = delta_q(6)
    assert [d.coeff(n) for n in range(1, 7)] == [1, -24, 252, -1472, 4830, -6048]
    assert d.coeff(0) == 0


def test_act_validates_determinant():
    lat = Lattice(1.2j, 1.0)
    with pytest.raises(ValueError):
        act((1, 1, 1, 1), 1.0, lat)
    moved = act((1, 1, 0, 1), 1.0, lat)
    assert moved.lam2 == lat.lam2


def test_lattice_orientation_enforced():
    with pytest.raises(ValueError):
        Lattice(-1.2j, 1.0)


def test_lattice_sum_matches_qexpansion_k4():
    lat = Lattice(complex(0.21, 1.37), complex(1.0, -0.2))
    direct = eisenstein_num(4, lat, 300)
    viaq = eisenstein_lattice(4, lat)
    assert abs(direct - viaq) / abs(viaq) < 1e-8


def test_lattice_sum_matches_qexpansion_k6():
    lat = Lattice(complex(-0.1, 1.1), 0.9)
    direct = eisenstein_num(6, lat, 200)
    viaq = eisenstein_lattice(6, lat)
    assert abs(direct - viaq) / abs(viaq) < 1e-8


def test_eisenstein_summed_g2_close():
    lat = Lattice(1.3j, 1.0)
    direct = eisenstein_num(2, lat, 60)
    viaq = g2_lattice(lat)
    assert abs(direct - viaq) / abs(viaq) < 0.05


def test_weight_law_g4_g6():
    for k in (4, 6):
        rep = check_weight(lambda lat, k=k: eisenstein_lattice(k, lat), k, seed=7)
        assert rep.ok, f"k={k} worst {rep.max_rel}"


def test_weight_law_delta():
    d = delta_q(40)
    rep = check_weight(lambda lat: lattice_value(d, 12, lat), 12, seed=11)
    assert rep.ok, rep.max_rel


def test_g2_breaks_weight_law():
    rep = check_weight(g2_lattice, 2, seed=5)
    assert not rep.ok
    assert rep.max_rel > 1e-3


def test_g2_anomaly_constant():
    rs = g2_anomaly_samples(count=8, seed=3)
    mean = sum(rs) / len(rs)
    assert max(abs(r - mean) for r in rs) < 1e-6 * abs(mean)
    # the measured constant
    assert abs(mean - (-2j * math.pi)) < 1e-6


def test_q_is_exponential_of_tau():
    rng = random.Random(2)
    lat = random_lattice(rng)
    assert cmath.isclose(lat.q, cmath.exp(2j * math.pi * lat.tau))
