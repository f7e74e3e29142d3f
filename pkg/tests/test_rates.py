"""Tests for the closed-form rate functions and phase diagram.

Frozen reference values were computed independently with 40-digit mpmath
evaluations of the same formulas (and mpmath root-finding for the
mean-field roots), then rounded to doubles.
"""

import csv
import io
import json
import math
import random

import pytest

from rcmtools import rates
from rcmtools.errors import CriticalPointError, DomainError

# mpmath-frozen references
ENTROPY_QUARTER = -0.5623351446188084
PI1_ONE = 0.63212055882855767
PSI_TWO = -0.056852819440054693
CONNECTED_RATE_ONE = -0.45867514538708187
THETA_MAX_2_1 = 0.79681213002002005
THETA_MAX_3_2 = 0.85855963664011037
THETA_MAX_4_2 = 0.95750402407726876
G_AT_MAX_3_2 = 0.4607766755259789
FREE_ENERGY_3_2 = 0.058341349441440038
XI_HALF_ONE = -0.48960494900724327
LAMBDA_C_4 = 3.2958368660043291


class TestEntropy:
    def test_half(self):
        assert rates.entropy(0.5) == pytest.approx(math.log(0.5), abs=1e-15)

    def test_endpoints_extend_continuously(self):
        assert rates.entropy(0.0) == 0.0
        assert rates.entropy(1.0) == 0.0

    def test_quarter(self):
        assert rates.entropy(0.25) == pytest.approx(ENTROPY_QUARTER, abs=1e-12)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            rates.entropy(-0.1)
        with pytest.raises(DomainError):
            rates.entropy(1.1)


class TestPi1:
    def test_zero(self):
        assert rates.pi1(0.0) == 0.0

    def test_one(self):
        assert rates.pi1(1.0) == pytest.approx(PI1_ONE, abs=1e-15)

    def test_monotone_and_bounded(self):
        xs = [0.01 * i for i in range(1, 2000)]
        vals = [rates.pi1(x) for x in xs]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert all(v < 1.0 for v in vals)

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            rates.pi1(-1e-9)


class TestPsi:
    def test_one_is_zero(self):
        assert rates.psi(1.0) == 0.0

    def test_below_one_clamps_to_zero(self):
        assert rates.psi(0.5) == 0.0

    def test_two(self):
        assert rates.psi(2.0) == pytest.approx(PSI_TWO, abs=1e-15)

    def test_negative_iff_above_one(self):
        for x in (0.05, 0.3, 0.999, 1.0):
            assert rates.psi(x) == 0.0
        for x in (1.001, 2.0, 7.5):
            assert rates.psi(x) < 0.0

    def test_nonpositive_domain(self):
        with pytest.raises(DomainError):
            rates.psi(0.0)


class TestPhi:
    def test_endpoint_one_is_connected_rate(self):
        rng = random.Random(1)
        for _ in range(100):
            lam = rng.uniform(0.1, 10.0)
            q = rng.uniform(0.5, 10.0)
            assert abs(rates.phi(1.0, lam, q) - rates.connected_rate(lam)) <= 1e-12

    def test_endpoint_zero_is_acyclic_rate(self):
        rng = random.Random(2)
        for _ in range(100):
            lam = rng.uniform(0.1, 10.0)
            q = rng.uniform(0.5, 10.0)
            assert abs(rates.phi(0.0, lam, q) - rates.acyclic_rate(lam, q)) <= 1e-12

    def test_endpoints_are_continuous_limits(self):
        for lam, q in ((0.7, 2.0), (3.0, 1.5), (5.0, 4.0)):
            for h in (1e-7, 1e-9):
                assert rates.phi(h, lam, q) == pytest.approx(
                    rates.phi(0.0, lam, q), abs=1e-5
                )
                assert rates.phi(1.0 - h, lam, q) == pytest.approx(
                    rates.phi(1.0, lam, q), abs=1e-5
                )

    def test_percolation_sup_vanishes(self):
        for lam in (0.5, 1.5, 3.0):
            assert abs(rates.phi_sup(lam, 1.0)) <= 1e-6

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            rates.phi(0.5, -1.0, 2.0)
        with pytest.raises(DomainError):
            rates.phi(0.5, 1.0, 0.0)
        with pytest.raises(DomainError):
            rates.phi(1.5, 1.0, 1.0)


class TestLambdaC:
    def test_percolation(self):
        assert rates.lambda_c(1.0) == 1.0

    def test_boundary_branch(self):
        assert rates.lambda_c(2.0) == 2.0

    def test_q_four(self):
        assert rates.lambda_c(4.0) == pytest.approx(LAMBDA_C_4, abs=1e-14)

    def test_continuous_across_branch(self):
        assert rates.lambda_c(2.0 + 1e-9) == pytest.approx(2.0, abs=1e-6)


class TestMeanFieldRoots:
    def test_always_contains_zero(self):
        assert rates.mean_field_roots(0.5, 3.0)[0] == 0.0

    def test_largest_root_2_1(self):
        roots = rates.mean_field_roots(2.0, 1.0)
        assert roots[-1] == pytest.approx(THETA_MAX_2_1, abs=1e-9)

    def test_largest_root_3_2(self):
        roots = rates.mean_field_roots(3.0, 2.0)
        assert roots[-1] == pytest.approx(THETA_MAX_3_2, abs=1e-9)

    def test_subcritical_small_q_only_zero(self):
        for q in (0.7, 1.0, 1.5, 2.0):
            for lam in (0.3 * q, 0.7 * q, 0.95 * q):
                assert rates.mean_field_roots(lam, q) == [0.0]

    def test_residuals(self):
        rng = random.Random(3)
        for _ in range(50):
            lam = rng.uniform(0.2, 9.0)
            q = rng.uniform(0.5, 9.0)
            for theta in rates.mean_field_roots(lam, q):
                lhs = math.exp(-lam * theta)
                rhs = (1.0 - theta) / (1.0 + (q - 1.0) * theta)
                assert abs(lhs - rhs) <= 1e-10

    def test_first_order_region_has_three_roots(self):
        # q=4 just below critical: metastable positive roots exist
        roots = rates.mean_field_roots(3.25, 4.0)
        assert len(roots) == 3

    def test_theta_max_nondecreasing_in_lambda(self):
        for q in (1.0, 2.0, 3.0, 4.0):
            lams = [rates.lambda_c(q) + 0.05 + 0.2 * i for i in range(15)]
            tmax = [rates.mean_field_roots(lam, q)[-1] for lam in lams]
            assert all(a <= b + 1e-12 for a, b in zip(tmax, tmax[1:]))


class TestThetaStar:
    def test_subcritical(self):
        assert rates.theta_star(1.0, 2.0) == 0.0
        assert rates.theta_star(3.1, 4.0) == 0.0

    def test_supercritical(self):
        assert rates.theta_star(3.0, 2.0) == pytest.approx(THETA_MAX_3_2, abs=1e-9)

    def test_refuses_critical_point(self):
        with pytest.raises(CriticalPointError):
            rates.theta_star(2.0, 2.0)
        with pytest.raises(CriticalPointError):
            rates.theta_star(1.0, 1.0)

    def test_matches_grid_argmax(self):
        rng = random.Random(4)
        checked = 0
        while checked < 25:
            lam = rng.uniform(0.2, 8.0)
            q = rng.uniform(0.5, 8.0)
            if abs(lam - rates.lambda_c(q)) <= 0.05:
                continue
            checked += 1
            grid = 2048
            argmax = rates.phi_argmax(lam, q, grid)
            assert abs(argmax - rates.theta_star(lam, q)) <= 1.0 / grid + 1e-12


class TestG:
    def test_zero_at_origin(self):
        for q in (0.5, 1.0, 2.0, 5.0):
            assert rates.g(0.0, q) == 0.0

    def test_vanishes_at_percolation(self):
        for theta in (0.1, 0.5, 0.9):
            assert rates.g(theta, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_value_at_giant_fraction(self):
        assert rates.g(THETA_MAX_3_2, 2.0) == pytest.approx(G_AT_MAX_3_2, abs=1e-12)

    def test_divergence_guard(self):
        with pytest.raises(DomainError):
            rates.g(1.0, 2.0)

    def test_second_derivative_matches_finite_difference(self):
        h = 1e-4
        for q in (1.5, 2.0, 3.0, 6.0):
            for theta in (0.1, 0.3, 0.55, 0.8):
                fd = (
                    rates.g(theta - h, q)
                    - 2.0 * rates.g(theta, q)
                    + rates.g(theta + h, q)
                ) / h**2
                closed = rates.g_second_derivative(theta, q)
                assert fd == pytest.approx(closed, rel=1e-5)

    def test_zero_of_g_at_theta_c(self):
        from rcmtools.optimize import bisect_root

        for q in (2.5, 3.0, 4.0, 6.0):
            theta_c = (q - 2.0) / (q - 1.0)
            root = bisect_root(
                lambda t: rates.g(t, q), theta_c / 2.0, 1.0 - 1e-9, tol=1e-12
            )
            assert abs(root - theta_c) <= 1e-9


class TestFreeEnergy:
    def test_percolation_is_zero(self):
        for lam in (0.5, 0.99, 1.5, 3.0, 8.0):
            assert abs(rates.free_energy(lam, 1.0)) <= 1e-6

    def test_subcritical_value(self):
        assert rates.free_energy(1.0, 2.0) == pytest.approx(
            math.log(2.0) - 0.25, abs=1e-14
        )

    def test_supercritical_value(self):
        assert rates.free_energy(3.0, 2.0) == pytest.approx(
            FREE_ENERGY_3_2, abs=1e-10
        )

    def test_matches_numeric_sup(self):
        rng = random.Random(5)
        checked = 0
        while checked < 25:
            lam = rng.uniform(0.1, 10.0)
            q = rng.uniform(0.5, 10.0)
            if abs(lam - rates.lambda_c(q)) <= 0.05:
                continue
            checked += 1
            assert abs(rates.free_energy(lam, q) - rates.phi_sup(lam, q)) <= 1e-6

    def test_refuses_critical_point(self):
        with pytest.raises(CriticalPointError):
            rates.free_energy(2.0, 2.0)


class TestConnectedAcyclicRates:
    def test_connected_rate_at_one(self):
        assert rates.connected_rate(1.0) == pytest.approx(
            CONNECTED_RATE_ONE, abs=1e-14
        )

    def test_connected_rate_tends_to_zero(self):
        assert -1e-8 < rates.connected_rate(20.0) < 0.0

    def test_acyclic_rate_examples(self):
        assert rates.acyclic_rate(1.0, 2.0) == pytest.approx(
            math.log(2.0) - 0.25, abs=1e-14
        )
        for lam in (0.4, 1.0, 2.5, 6.0):
            assert rates.acyclic_rate(lam, 1.0) == pytest.approx(
                rates.psi(lam), abs=1e-14
            )


class TestXi:
    def test_symmetric_about_half(self):
        rng = random.Random(6)
        for _ in range(200):
            theta = rng.uniform(0.01, 0.99)
            lam = rng.uniform(0.2, 8.0)
            assert abs(rates.xi(theta, lam) - rates.xi(1.0 - theta, lam)) <= 1e-12

    def test_value_at_half(self):
        assert rates.xi(0.5, 1.0) == pytest.approx(XI_HALF_ONE, abs=1e-12)

    def test_discrete_convexity(self):
        grid = [i / 200 for i in range(1, 200)]
        vals = [rates.xi(t, 2.0) for t in grid]
        for i in range(1, len(vals) - 1):
            assert vals[i - 1] - 2.0 * vals[i] + vals[i + 1] >= -1e-9

    def test_endpoints_rejected(self):
        with pytest.raises(DomainError):
            rates.xi(0.0, 1.0)
        with pytest.raises(DomainError):
            rates.xi(1.0, 1.0)


class TestArtifacts:
    def test_rate_curve_csv_format(self):
        curve = rates.rate_curve(3.0, 2.0, grid_size=64)
        text = curve.to_csv()
        assert text.startswith("theta,phi\n")
        assert "\r" not in text
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["theta", "phi"]
        assert len(rows) == 66
        thetas = [float(r[0]) for r in rows[1:]]
        assert thetas[0] == 0.0 and thetas[-1] == 1.0
        assert all(a < b for a, b in zip(thetas, thetas[1:]))
        # 17 significant digits survive a round trip
        assert float(rows[2][1]) == rates.phi(1 / 64, 3.0, 2.0)

    def test_phase_point_json(self):
        point = rates.phase_point(3.0, 2.0)
        doc = json.loads(point.to_json())
        assert list(doc) == [
            "lambda",
            "q",
            "lambda_c",
            "theta_star",
            "theta_max",
            "free_energy",
        ]
        assert all(isinstance(v, str) for v in doc.values())
        assert float(doc["theta_star"]) == pytest.approx(THETA_MAX_3_2, abs=1e-9)

    def test_phase_point_invariants(self):
        sub = rates.phase_point(1.5, 2.0)
        assert sub.theta_star == 0.0
        sup = rates.phase_point(4.0, 2.0)
        assert sup.theta_star == sup.theta_max
        assert sup.theta_max == pytest.approx(THETA_MAX_4_2, abs=1e-9)
