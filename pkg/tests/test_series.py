import math

import numpy as np
import pytest

from potgain import (
    SeriesConfig,
    convergence_curve,
    crossover_delta,
    degrees,
    eigenvalue_transforms,
    estimate_spectral_radius,
    exponential_potential_gain,
    geometric_potential_gain,
    katz,
    spmv,
)
from potgain.errors import (
    DivergenceRiskError,
    DomainError,
    OverflowRiskError,
    PoleError,
    UnreliableReferenceError,
)
from potgain.oracle import (
    dense_expm_action,
    dense_from_graph,
    dense_neumann_solve,
    dense_symmetric_eigen,
)

from conftest import complete_graph, cycle_graph, gnp_graph


def rel(x, ref):
    return np.max(np.abs(np.asarray(x) - ref) / np.abs(ref))


class TestGeometric:
    def test_k3_closed_form(self, k3):
        g, rep = geometric_potential_gain(k3, SeriesConfig(delta=0.25, tol=1e-15))
        np.testing.assert_allclose(g.values, 4.0, rtol=1e-14)
        assert rep.stop_reason == "tolerance"
        assert g.metric == "gpg" and g.graph_fingerprint == k3.fingerprint

    def test_k3_dense_cross_check(self, k3):
        gpg, kz = dense_neumann_solve(dense_from_graph(k3), 0.25)
        np.testing.assert_allclose(gpg, 4.0, rtol=1e-14)
        np.testing.assert_allclose(kz, 2.0, rtol=1e-14)

    def test_delta_zero_is_degree(self):
        g = gnp_graph(30, 0.2, seed=4)
        sv, rep = geometric_potential_gain(g, SeriesConfig(delta=0.0))
        assert np.array_equal(sv.values, degrees(g).astype(float))
        assert rep.terms == 2

    def test_single_edge(self, single_edge):
        sv, _ = geometric_potential_gain(single_edge, SeriesConfig(delta=0.5, tol=1e-15))
        np.testing.assert_allclose(sv.values, 2.0, rtol=1e-14)

    def test_random_matches_dense_solve(self):
        g = gnp_graph(15, 0.3, seed=11)
        lam = estimate_spectral_radius(g).lambda1
        delta = 0.5 / lam
        sv, _ = geometric_potential_gain(g, SeriesConfig(delta=delta, tol=1e-14), lam)
        ref, _ = dense_neumann_solve(dense_from_graph(g), delta)
        assert rel(sv.values, ref) < 1e-10

    def test_default_delta_is_half_inverse_radius(self, star4):
        sv, rep = geometric_potential_gain(star4)
        assert rep.delta == pytest.approx(0.25)
        assert sv.params["delta"] == pytest.approx(0.25)

    def test_divergence_guard(self, k3):
        with pytest.raises(DivergenceRiskError):
            geometric_potential_gain(k3, SeriesConfig(delta=0.5))
        with pytest.raises(DivergenceRiskError):
            geometric_potential_gain(k3, SeriesConfig(delta=0.49999))
        geometric_potential_gain(k3, SeriesConfig(delta=0.4999))

    def test_negative_delta(self):
        with pytest.raises(DomainError):
            SeriesConfig(delta=-0.1)

    def test_k_max_stop(self, k3):
        sv, rep = geometric_potential_gain(k3, SeriesConfig(delta=0.25, k_max=5))
        assert rep.stop_reason == "k_max" and rep.terms == 5
        assert not sv.converged
        np.testing.assert_allclose(sv.values, 4 * (1 - 0.5 ** 5))

    def test_katz_identity(self):
        g = gnp_graph(40, 0.15, seed=2)
        lam = estimate_spectral_radius(g).lambda1
        for r in (0.1, 0.5, 0.9):
            d = r / lam
            sv, _ = geometric_potential_gain(g, SeriesConfig(delta=d, tol=1e-15, k_max=500), lam)
            kz = katz(g, d, tol=1e-15, k_max=500, spectral=lam)
            assert rel(sv.values, spmv(g, kz.values)) < 1e-10

    def test_degree_limit(self):
        g = gnp_graph(50, 0.1, seed=8)
        sv, _ = geometric_potential_gain(g, SeriesConfig(delta=1e-9))
        d = degrees(g)
        assert rel(sv.values, d) < 1e-6

    def test_increment_contraction(self):
        # ||A y|| <= lambda1 ||y|| for symmetric A, so increments shrink by delta*lambda1.
        g = gnp_graph(60, 0.1, seed=9)
        lam = estimate_spectral_radius(g).lambda1
        delta = 0.7 / lam
        _, rep = geometric_potential_gain(g, SeriesConfig(delta=delta, tol=1e-14), lam)
        inc = np.array(rep.increment_norm)
        assert np.all(inc[1:] <= delta * lam * inc[:-1] * (1 + 1e-9))


class TestExponential:
    def test_k3_closed_form(self, k3):
        sv, _ = exponential_potential_gain(k3, SeriesConfig(tol=1e-15))
        np.testing.assert_allclose(sv.values, 2 * math.e ** 2, rtol=1e-13)
        assert sv.values[0] == pytest.approx(14.7781121979, abs=1e-9)

    def test_k3_dense(self, k3):
        c, e = dense_expm_action(dense_from_graph(k3))
        np.testing.assert_allclose(c, math.e ** 2, rtol=1e-13)
        np.testing.assert_allclose(e, 2 * math.e ** 2, rtol=1e-13)

    def test_single_edge(self, single_edge):
        sv, _ = exponential_potential_gain(single_edge, SeriesConfig(tol=1e-15))
        np.testing.assert_allclose(sv.values, math.e, rtol=1e-14)

    def test_random_matches_dense(self):
        g = gnp_graph(15, 0.3, seed=12)
        sv, _ = exponential_potential_gain(g, SeriesConfig(tol=1e-15))
        _, ref = dense_expm_action(dense_from_graph(g))
        assert rel(sv.values, ref) < 1e-10

    def test_delta_is_ignored(self, k3):
        a, _ = exponential_potential_gain(k3, SeriesConfig(delta=0.1))
        b, _ = exponential_potential_gain(k3, SeriesConfig(delta=0.3))
        assert np.array_equal(a.values, b.values)

    def test_overflow_guard(self, k3):
        with pytest.raises(OverflowRiskError, match="geometric"):
            exponential_potential_gain(k3, spectral=700.0)

    def test_default_k_max(self, k3):
        _, rep = exponential_potential_gain(k3, SeriesConfig(tol=1e-300))
        assert rep.terms == 30
        g = complete_graph(12)
        _, rep = exponential_potential_gain(g, SeriesConfig(tol=1e-300))
        assert rep.terms == math.ceil(4 * math.e * 11)


@pytest.mark.parametrize("g", [complete_graph(3), cycle_graph(6), complete_graph(5)],
                         ids=["K3", "C6", "K5"])
def test_regular_closed_forms(g):
    d = int(degrees(g)[0])
    for delta in (0.05, 0.5 / d, 0.9 / d):
        sv, _ = geometric_potential_gain(g, SeriesConfig(delta=delta, tol=1e-15, k_max=500))
        np.testing.assert_allclose(sv.values, d / (1 - delta * d), rtol=1e-10)
    sv, _ = exponential_potential_gain(g, SeriesConfig(tol=1e-15))
    np.testing.assert_allclose(sv.values, d * math.exp(d), rtol=1e-10)


def test_positivity():
    for seed in range(5):
        g = gnp_graph(30, 0.1, seed)
        assert np.all(geometric_potential_gain(g)[0].values > 0)
        assert np.all(exponential_potential_gain(g)[0].values > 0)


class TestConvergenceCurve:
    def test_k3_exact_halving(self, k3):
        rep = convergence_curve(k3, SeriesConfig(delta=0.25, k_max=30))
        eps = np.array(rep.epsilon)
        np.testing.assert_allclose(eps, 0.5 ** np.arange(1, 31), rtol=0, atol=1e-12)
        assert rep.rate_estimate == pytest.approx(0.5, abs=1e-9)

    def test_k3_delta_04(self, k3):
        rep = convergence_curve(k3, SeriesConfig(delta=0.4, k_max=100))
        assert rep.rate_estimate == pytest.approx(0.8, abs=0.01)

    def test_random_graph_rate_and_bound(self):
        g = gnp_graph(30, 0.2, seed=3)
        lam = estimate_spectral_radius(g).lambda1
        delta = 0.5 / lam
        rep = convergence_curve(g, SeriesConfig(delta=delta, k_max=36), spectral=lam)
        assert 0.45 <= rep.rate_estimate <= 0.55
        exact, _ = dense_neumann_solve(dense_from_graph(g), delta)
        total = np.zeros(g.n)
        term = spmv(g, np.ones(g.n))
        r = delta * lam
        for k in range(1, 60):
            if k > 1:
                term = delta * spmv(g, term)
            total += term
            eps = np.linalg.norm(exact - total) / np.linalg.norm(exact)
            assert eps <= r ** k / (1 - r) + 1e-14

    def test_exponential_curve_decreases(self):
        g = gnp_graph(25, 0.3, seed=6)
        rep = convergence_curve(g, variant="exponential")
        eps = np.array(rep.epsilon)
        lam = rep.lambda1
        tail = eps[int(lam) + 1:]
        tail = tail[tail > 1e-14]
        assert np.all(np.diff(tail) <= 0)

    def test_unreliable_reference(self):
        g = gnp_graph(25, 0.3, seed=6)
        lam = estimate_spectral_radius(g).lambda1
        with pytest.raises(UnreliableReferenceError):
            convergence_curve(g, SeriesConfig(delta=0.9 / lam, k_max=5, k_ref=20), spectral=lam)

    def test_k_ref_must_exceed_k_max(self):
        with pytest.raises(DomainError):
            SeriesConfig(k_max=10, k_ref=10)


class TestCrossover:
    def test_lambda_two(self):
        c = crossover_delta(2.0)
        assert c.delta_c == pytest.approx(0.4323, abs=1e-4)
        assert c.admissible
        assert 2 / (1 - 2 * c.delta_c) == pytest.approx(2 * math.e ** 2, rel=1e-12)

    def test_lambda_one(self):
        c = crossover_delta(1.0)
        assert c.delta_c == pytest.approx((math.e - 1) / math.e, rel=1e-15)
        assert c.admissible

    def test_small_lambda_limit(self):
        assert crossover_delta(1e-12).delta_c == pytest.approx(1.0, abs=1e-11)

    def test_zero_lambda(self):
        with pytest.raises(DomainError):
            crossover_delta(0.0)

    def test_admissibility_against_graph_radius(self):
        # Only eigenvalues close to lambda1 cross below 1/lambda1.
        assert not crossover_delta(0.5, lambda1=4.0).admissible
        assert not crossover_delta(3.5, lambda1=4.0).admissible
        assert crossover_delta(3.99, lambda1=4.0).admissible
        assert not crossover_delta(-1.0, lambda1=4.0).admissible

    def test_componentwise_gap_is_reported_not_zero(self, star4):
        # The per-node difference g - e at the crossover of lambda1 need not vanish.
        lam = estimate_spectral_radius(star4).lambda1
        c = crossover_delta(lam)
        g, _ = geometric_potential_gain(star4, SeriesConfig(delta=c.delta_c, tol=1e-15), lam)
        e, _ = exponential_potential_gain(star4, SeriesConfig(tol=1e-15), lam)
        assert np.all(np.isfinite(g.values - e.values))


class TestEigenvalueTransforms:
    def test_zero(self):
        a, b = eigenvalue_transforms([0.0], 0.3)
        assert a[0] == 0 and b[0] == 0

    def test_two(self):
        a, b = eigenvalue_transforms([2.0], 0.25)
        assert a[0] == pytest.approx(4.0)
        assert b[0] == pytest.approx(2 * math.e ** 2)

    def test_k3_spectrum(self, k3):
        evals, _ = dense_symmetric_eigen(dense_from_graph(k3))
        np.testing.assert_allclose(evals, [2, -1, -1], atol=1e-12)
        a, _ = eigenvalue_transforms(evals, 0.25)
        np.testing.assert_allclose(a, [4, -0.8, -0.8], atol=1e-12)

    def test_pole(self):
        with pytest.raises(PoleError):
            eigenvalue_transforms([1.0, 2.0], 0.5)

    def test_transforms_match_dense_gains(self):
        # A (I - dA)^-1 1 and A exp(A) 1 expand in the eigenbasis with the transformed spectra.
        g = gnp_graph(12, 0.4, seed=2)
        A = dense_from_graph(g)
        evals, V = dense_symmetric_eigen(A)
        delta = 0.5 / evals[0]
        tg, te = eigenvalue_transforms(evals, delta)
        coeff = V.T @ np.ones(g.n)
        gpg, _ = dense_neumann_solve(A, delta)
        _, epg = dense_expm_action(A)
        np.testing.assert_allclose(V @ (tg * coeff), gpg, rtol=1e-9)
        np.testing.assert_allclose(V @ (te * coeff), epg, rtol=1e-9)

