import math

import numpy as np
import pytest
from scipy import stats

from glyphforge.errors import LengthMismatch, NonFinite, ZeroDensity
from glyphforge.gmm import (
    DEFAULT_COMPONENTS,
    GmmParams,
    activate,
    activate_sequence,
    density,
    loss_label,
    loss_point,
    loss_point_grad,
    sample,
)
from glyphforge.gradcheck import central_difference, rel_errors
from glyphforge.rng import make_rng


def standard_params(m=1):
    return GmmParams(
        pi=np.full(m, 1.0 / m),
        mu_x=np.zeros(m),
        mu_y=np.zeros(m),
        sigma_x=np.ones(m),
        sigma_y=np.ones(m),
        rho=np.zeros(m),
    )


def random_params(rng, m=3):
    return activate(rng.normal(0, 0.6, 6 * m))


def scipy_density(params, x, y):
    """Independent oracle: sum of scipy multivariate-normal pdfs."""
    total = 0.0
    for k in range(params.n_components):
        sx, sy, r = params.sigma_x[k], params.sigma_y[k], params.rho[k]
        cov = [[sx**2, r * sx * sy], [r * sx * sy, sy**2]]
        total += params.pi[k] * stats.multivariate_normal.pdf(
            [x, y], mean=[params.mu_x[k], params.mu_y[k]], cov=cov
        )
    return total


class TestActivate:
    def test_uniform_weights(self):
        p = activate(np.zeros(6 * 4))
        assert p.pi == pytest.approx(np.full(4, 0.25))

    def test_identity_activations(self):
        p = activate(np.zeros(6))
        assert p.sigma_x[0] == 1.0 and p.sigma_y[0] == 1.0
        assert p.rho[0] == 0.0

    def test_default_component_count(self):
        assert DEFAULT_COMPONENTS == 20

    def test_total_on_finite_inputs(self):
        rng = make_rng(12, 0)
        for _ in range(50):
            p = activate(rng.normal(0, 10, 6 * 5))
            assert abs(p.pi.sum() - 1.0) < 1e-9
            assert np.all(p.sigma_x > 0) and np.all(np.abs(p.rho) < 1)

    def test_non_finite_rejected(self):
        raw = np.zeros(6)
        raw[0] = np.nan
        with pytest.raises(NonFinite):
            activate(raw)

    def test_bad_width_rejected(self):
        with pytest.raises(ValueError):
            activate(np.zeros(7))


class TestDensity:
    def test_standard_normal_peak(self):
        assert density(standard_params(), 0.0, 0.0) == pytest.approx(
            1.0 / (2 * math.pi), abs=1e-12
        )

    def test_independence_factorization(self):
        p = GmmParams(
            pi=[1.0], mu_x=[0.3], mu_y=[-0.2], sigma_x=[0.7], sigma_y=[1.4], rho=[0.0]
        )
        for x, y in [(0.0, 0.0), (0.5, -1.0), (2.0, 0.3)]:
            expected = stats.norm.pdf(x, 0.3, 0.7) * stats.norm.pdf(y, -0.2, 1.4)
            assert density(p, x, y) == pytest.approx(expected, rel=1e-12)

    def test_mixture_matches_scipy(self):
        rng = make_rng(12, 1)
        p = random_params(rng, m=3)
        for _ in range(5):
            x, y = rng.uniform(-1, 1, 2)
            assert density(p, x, y) == pytest.approx(scipy_density(p, x, y), rel=1e-10)

    def test_component_permutation_invariance(self):
        rng = make_rng(12, 2)
        p = random_params(rng, m=4)
        perm = rng.permutation(4)
        q = GmmParams(
            pi=p.pi[perm], mu_x=p.mu_x[perm], mu_y=p.mu_y[perm],
            sigma_x=p.sigma_x[perm], sigma_y=p.sigma_y[perm], rho=p.rho[perm],
        )
        assert density(p, 0.2, -0.4) == pytest.approx(density(q, 0.2, -0.4), rel=1e-14)

    def test_nonnegative(self):
        rng = make_rng(12, 3)
        p = random_params(rng)
        assert all(density(p, *rng.uniform(-2, 2, 2)) >= 0 for _ in range(20))

    def test_quadrature_mass_for_compact_mixture(self):
        rng = make_rng(12, 4)
        m = 3
        p = GmmParams(
            pi=np.full(m, 1 / m),
            mu_x=rng.uniform(-0.5, 0.5, m),
            mu_y=rng.uniform(-0.5, 0.5, m),
            sigma_x=rng.uniform(0.02, 0.1, m),
            sigma_y=rng.uniform(0.02, 0.1, m),
            rho=rng.uniform(-0.6, 0.6, m),
        )
        xs = np.linspace(-1, 1, 401)
        grid = np.array([[density(p, x, y) for x in xs] for y in xs])
        mass = np.trapezoid(np.trapezoid(grid, xs, axis=1), xs)
        assert mass >= 0.999


class TestLossPoint:
    def test_at_mean_of_standard(self):
        loss = loss_point([standard_params()], np.array([[0.0, 0.0]]))
        assert loss == pytest.approx(math.log(2 * math.pi), abs=1e-12)

    def test_mean_invariance_under_duplication(self):
        rng = make_rng(12, 5)
        params = [random_params(rng) for _ in range(3)]
        targets = rng.uniform(-0.5, 0.5, (3, 2))
        base = loss_point(params, targets)
        doubled = loss_point(params * 2, np.vstack([targets, targets]))
        assert doubled == pytest.approx(base, rel=1e-14)

    def test_matches_independent_summation(self):
        rng = make_rng(12, 6)
        params = [random_params(rng) for _ in range(5)]
        targets = rng.uniform(-0.8, 0.8, (5, 2))
        oracle = -np.mean(
            [math.log(scipy_density(p, x, y)) for p, (x, y) in zip(params, targets)]
        )
        assert loss_point(params, targets) == pytest.approx(oracle, abs=1e-10)

    def test_zero_density_reports_step(self):
        tight = GmmParams(
            pi=[1.0], mu_x=[0.0], mu_y=[0.0], sigma_x=[1e-4], sigma_y=[1e-4], rho=[0.0]
        )
        with pytest.raises(ZeroDensity) as exc:
            loss_point([standard_params(), tight], np.array([[0.0, 0.0], [0.9, 0.9]]))
        assert exc.value.step == 1

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            loss_point([standard_params()], np.array([[0.0, 0.0], [0.1, 0.1]]))


class TestLossPointGrad:
    def test_stationary_at_mean(self):
        raw = np.zeros((1, 6))
        grad = loss_point_grad(raw, np.array([[0.0, 0.0]]))
        assert grad[0, 1] == 0.0 and grad[0, 2] == 0.0  # mu blocks

    def test_weight_block_sums_to_zero(self):
        rng = make_rng(12, 7)
        m = 4
        raw = rng.normal(0, 0.5, (2, 6 * m))
        grad = loss_point_grad(raw, rng.uniform(-0.5, 0.5, (2, 2)))
        assert grad[:, :m].sum(axis=1) == pytest.approx(np.zeros(2), abs=1e-14)

    def test_matches_finite_differences(self):
        rng = make_rng(12, 8)
        m = 3
        raw = rng.normal(0, 0.5, (2, 6 * m))
        targets = rng.uniform(-0.5, 0.5, (2, 2))
        grad = loss_point_grad(raw, targets)
        fd = central_difference(
            lambda r: loss_point(activate_sequence(r), targets), raw, 1e-6
        )
        assert np.max(rel_errors(grad, fd)) < 1e-5


class TestSample:
    def test_deterministic(self):
        rng = make_rng(12, 9)
        p = random_params(rng)
        assert sample(p, 123) == sample(p, 123)
        assert sample(p, 123) != sample(p, 124)

    def test_degenerate_scale_returns_mean(self):
        p = GmmParams(
            pi=[1.0], mu_x=[0.25], mu_y=[-0.5], sigma_x=[1e-12], sigma_y=[1e-12], rho=[0.0]
        )
        x, y = sample(p, 7)
        assert x == pytest.approx(0.25, abs=1e-9)
        assert y == pytest.approx(-0.5, abs=1e-9)

    def test_empirical_correlation(self):
        p = GmmParams(
            pi=[1.0], mu_x=[0.0], mu_y=[0.0], sigma_x=[1.0], sigma_y=[1.0], rho=[0.5]
        )
        pts = np.array([sample(p, seed) for seed in range(100_000)])
        corr = np.corrcoef(pts[:, 0], pts[:, 1])[0, 1]
        assert corr == pytest.approx(0.5, abs=0.02)


class TestLossLabel:
    def test_uniform_logits(self):
        assert loss_label(np.zeros(4), [0, 0, 1, 0]) == pytest.approx(
            math.log(4), abs=1e-12
        )

    def test_saturated_correct_class(self):
        q = np.array([0.0, 50.0, 0.0, 0.0])
        assert loss_label(q, [0, 1, 0, 0]) < 1e-9

    def test_matches_log_softmax_oracle(self):
        rng = make_rng(12, 10)
        for _ in range(20):
            q = rng.normal(0, 3, 4)
            k = int(rng.integers(4))
            one_hot = np.eye(4, dtype=int)[k]
            oracle = -float(np.log(np.exp(q)[k] / np.exp(q).sum()))
            assert loss_label(q, one_hot) == pytest.approx(oracle, abs=1e-12)

    def test_rejects_non_one_hot(self):
        with pytest.raises(ValueError):
            loss_label(np.zeros(4), [1, 1, 0, 0])
