"""Iterative baseline mechanics: local steps, aggregation, accounting, DP.

Convergence checks pick learning rates from the data's spectrum so the
assertions are deterministic, not tuned. Hand-computed gradients serve as
oracles for the single-step and noise-injection paths.
"""

import math

import numpy as np
import pytest

from fedridge.baselines import (
    GradientGapReport,
    IterativeConfig,
    gradient_insufficiency_check,
    run_fedavg,
    run_fedprox,
)
from fedridge.datagen import SynthSpec, generate
from fedridge.errors import DivergenceError
from fedridge.privacy import PrivacyParams
from fedridge.protocol import run_one_shot
from fedridge.rng import generator
from fedridge.stats import ClientDataset, mean_squared_error


def reference_normals(seed_parts, count):
    """Reimplementation of the package's documented normal sampler."""
    rng = generator(*seed_parts)
    half = (count + 1) // 2
    u1 = rng.random(half)
    u2 = rng.random(half)
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * math.pi * u2
    return np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:count]


def random_clients(sizes, dim, seed=0, noise=0.1):
    """Clients with the given row counts over a shared linear signal."""
    rng = np.random.default_rng(seed)
    truth = rng.standard_normal(dim)
    truth /= np.linalg.norm(truth)
    clients = []
    for client_id, rows in enumerate(sizes):
        features = rng.standard_normal((rows, dim))
        targets = features @ truth + noise * rng.standard_normal(rows)
        clients.append(ClientDataset(features=features, targets=targets,
                                     client_id=client_id))
    return clients


def stable_learning_rate(clients, sigma):
    """Step size centered on the pooled spectrum: contraction is certain."""
    pooled = np.vstack([c.features for c in clients])
    eigenvalues = np.linalg.eigvalsh(pooled.T @ pooled)
    total = sum(c.n_samples for c in clients)
    return total / (eigenvalues[0] + eigenvalues[-1] + 2 * sigma)


class TestIterativeConfig:
    def test_defaults(self):
        config = IterativeConfig(rounds=10)
        assert config.learning_rate == 0.01
        assert config.local_epochs == 5
        assert config.proximal_mu == 0.01
        assert config.batch_size is None
        assert config.participation is None
        assert config.dp is None

    @pytest.mark.parametrize("kwargs", [
        {"rounds": 0},
        {"rounds": 10, "learning_rate": 0.0},
        {"rounds": 10, "learning_rate": -0.1},
        {"rounds": 10, "local_epochs": 0},
        {"rounds": 10, "proximal_mu": -0.01},
        {"rounds": 10, "batch_size": 0},
        {"rounds": 10, "participation": 0},
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            IterativeConfig(**kwargs)


class TestConvergenceToExactSolution:
    def test_single_local_pass_reaches_ridge_optimum(self):
        # With one local epoch the aggregate update is plain gradient
        # descent on the global objective, for any split of row counts.
        clients = random_clients([30, 50, 80], dim=5, seed=1)
        sigma = 0.01
        eta = stable_learning_rate(clients, sigma)
        exact, _ = run_one_shot(clients, sigma)
        config = IterativeConfig(rounds=120, learning_rate=eta, local_epochs=1)
        model, _, _ = run_fedavg(clients, sigma, config, seed=0)
        np.testing.assert_allclose(model.weights, exact.weights,
                                   rtol=0, atol=1e-8)

    def test_single_client_many_epochs_reaches_ridge_optimum(self):
        # One client owns the whole objective, so extra local epochs are
        # just more gradient steps on it.
        clients = random_clients([90], dim=4, seed=2)
        sigma = 0.05
        eta = stable_learning_rate(clients, sigma)
        exact, _ = run_one_shot(clients, sigma)
        config = IterativeConfig(rounds=80, learning_rate=eta, local_epochs=7)
        model, _, _ = run_fedavg(clients, sigma, config, seed=0)
        np.testing.assert_allclose(model.weights, exact.weights,
                                   rtol=0, atol=1e-8)

    def test_heterogeneous_multi_epoch_plateau_sits_off_optimum(self):
        spec = SynthSpec(clients=5, samples_per_client=100, dim=8, gamma=1.0,
                         seed=3)
        clients, test_set, _ = generate(spec)
        sigma = 0.01
        exact, _ = run_one_shot(clients, sigma)
        eta = 0.4 * stable_learning_rate(clients, sigma)
        config = IterativeConfig(rounds=500, learning_rate=eta, local_epochs=5)
        model, _, trajectory = run_fedavg(clients, sigma, config, seed=0,
                                          eval_set=test_set)
        gap = np.linalg.norm(model.weights - exact.weights)
        assert gap > 1e-8
        assert gap < 0.2 * np.linalg.norm(exact.weights)
        assert trajectory[-1] >= mean_squared_error(exact, test_set) - 1e-12
        # plateau: the last 100 rounds barely move
        assert abs(trajectory[-1] - trajectory[-100]) < 1e-6


class TestSingleStepOracle:
    def test_first_step_is_scaled_moment_vector(self):
        clients = random_clients([40], dim=6, seed=4)
        data = clients[0]
        eta = 0.003
        config = IterativeConfig(rounds=1, learning_rate=eta, local_epochs=1)
        model, _, _ = run_fedavg(clients, 0.01, config, seed=0)
        moment = data.features.T @ data.targets
        want = (2.0 * eta / data.n_samples) * moment
        np.testing.assert_allclose(model.weights, want, rtol=1e-12)


class TestFedProxReduction:
    def test_zero_mu_is_bitwise_fedavg(self):
        clients = random_clients([30, 40], dim=5, seed=5)
        config = IterativeConfig(rounds=25, learning_rate=0.002,
                                 local_epochs=3, proximal_mu=0.0)
        test_set = random_clients([50], dim=5, seed=6)[0]
        avg_model, avg_run, avg_traj = run_fedavg(clients, 0.01, config, seed=7,
                                                  eval_set=test_set)
        prox_model, prox_run, prox_traj = run_fedprox(clients, 0.01, config,
                                                      seed=7, eval_set=test_set)
        np.testing.assert_array_equal(prox_model.weights, avg_model.weights)
        assert prox_traj == avg_traj
        assert prox_run.total_upload_bytes == avg_run.total_upload_bytes

    def test_positive_mu_changes_trajectory(self):
        clients = random_clients([30, 40], dim=5, seed=5)
        base = IterativeConfig(rounds=25, learning_rate=0.002, local_epochs=3,
                               proximal_mu=0.0)
        pulled = IterativeConfig(rounds=25, learning_rate=0.002, local_epochs=3,
                                 proximal_mu=0.5)
        avg_model, _, _ = run_fedavg(clients, 0.01, base, seed=7)
        prox_model, _, _ = run_fedprox(clients, 0.01, pulled, seed=7)
        assert not np.array_equal(prox_model.weights, avg_model.weights)


class TestDivergenceGuard:
    def test_oversized_step_raises_with_round_number(self):
        clients = random_clients([40, 40], dim=5, seed=8)
        config = IterativeConfig(rounds=200, learning_rate=50.0, local_epochs=5)
        with pytest.raises(DivergenceError) as info:
            run_fedavg(clients, 0.01, config, seed=0)
        assert info.value.round_index >= 0
        assert "round" in str(info.value)

    def test_stable_step_does_not_raise(self):
        clients = random_clients([40, 40], dim=5, seed=8)
        config = IterativeConfig(rounds=50, learning_rate=0.001, local_epochs=5)
        model, _, _ = run_fedavg(clients, 0.01, config, seed=0)
        assert np.all(np.isfinite(model.weights))


class TestAccounting:
    def test_per_round_weight_exchange(self):
        clients = random_clients([20, 25, 30, 35], dim=6, seed=9)
        config = IterativeConfig(rounds=7, learning_rate=0.001)
        _, run, _ = run_fedavg(clients, 0.01, config, seed=0)
        assert run.round_count == 7
        assert run.total_upload_bytes == 7 * 4 * 6 * 8
        assert run.total_download_bytes == run.total_upload_bytes
        assert run.participating == frozenset({0, 1, 2, 3})
        assert run.wall_time_seconds >= 0.0

    def test_trajectory_length_and_final_value(self):
        clients = random_clients([30, 30], dim=4, seed=10)
        test_set = random_clients([40], dim=4, seed=11)[0]
        config = IterativeConfig(rounds=12, learning_rate=0.002)
        model, _, trajectory = run_fedavg(clients, 0.01, config, seed=0,
                                          eval_set=test_set)
        assert len(trajectory) == 12
        assert trajectory[-1] == mean_squared_error(model, test_set)

    def test_no_eval_set_no_trajectory(self):
        clients = random_clients([30], dim=4, seed=10)
        config = IterativeConfig(rounds=5, learning_rate=0.002)
        _, _, trajectory = run_fedavg(clients, 0.01, config, seed=0)
        assert trajectory == []


class TestParticipationSampling:
    def test_sampled_rounds_bill_only_active_clients(self):
        clients = random_clients([20] * 5, dim=4, seed=12)
        config = IterativeConfig(rounds=40, learning_rate=0.002,
                                 participation=2)
        _, run, _ = run_fedavg(clients, 0.01, config, seed=1)
        assert run.total_upload_bytes == 40 * 2 * 4 * 8
        assert run.participating == frozenset(range(5))

    def test_deterministic_and_seed_sensitive(self):
        clients = random_clients([20] * 5, dim=4, seed=12)
        config = IterativeConfig(rounds=15, learning_rate=0.002,
                                 participation=2)
        a, _, _ = run_fedavg(clients, 0.01, config, seed=1)
        b, _, _ = run_fedavg(clients, 0.01, config, seed=1)
        c, _, _ = run_fedavg(clients, 0.01, config, seed=2)
        np.testing.assert_array_equal(a.weights, b.weights)
        assert not np.array_equal(a.weights, c.weights)

    def test_oversized_participation_equals_full_pool(self):
        clients = random_clients([20] * 3, dim=4, seed=13)
        full = IterativeConfig(rounds=10, learning_rate=0.002)
        wide = IterativeConfig(rounds=10, learning_rate=0.002, participation=9)
        a, _, _ = run_fedavg(clients, 0.01, full, seed=3)
        b, _, _ = run_fedavg(clients, 0.01, wide, seed=3)
        np.testing.assert_array_equal(a.weights, b.weights)


class TestMinibatching:
    def test_minibatch_path_is_deterministic_and_distinct(self):
        clients = random_clients([50, 50], dim=5, seed=14)
        batched = IterativeConfig(rounds=20, learning_rate=0.002, batch_size=16)
        full = IterativeConfig(rounds=20, learning_rate=0.002)
        a, _, _ = run_fedavg(clients, 0.01, batched, seed=4)
        b, _, _ = run_fedavg(clients, 0.01, batched, seed=4)
        c, _, _ = run_fedavg(clients, 0.01, full, seed=4)
        np.testing.assert_array_equal(a.weights, b.weights)
        assert not np.array_equal(a.weights, c.weights)

    def test_batch_covering_all_rows_equals_full_batch(self):
        clients = random_clients([50, 50], dim=5, seed=14)
        covering = IterativeConfig(rounds=20, learning_rate=0.002,
                                   batch_size=50)
        full = IterativeConfig(rounds=20, learning_rate=0.002)
        a, _, _ = run_fedavg(clients, 0.01, covering, seed=4)
        b, _, _ = run_fedavg(clients, 0.01, full, seed=4)
        np.testing.assert_array_equal(a.weights, b.weights)


class TestDpVariant:
    def test_noise_stream_matches_oracle(self):
        clients = random_clients([40], dim=6, seed=15)
        # delta = 1.25 * exp(-1/2) makes tau exactly 1 at epsilon 1
        params = PrivacyParams(epsilon=1.0, delta=0.7581633246407918)
        noisy = IterativeConfig(rounds=1, learning_rate=1e-6, local_epochs=1,
                                dp=params)
        clean = IterativeConfig(rounds=1, learning_rate=1e-6, local_epochs=1)
        noisy_model, _, _ = run_fedavg(clients, 0.01, noisy, seed=6)
        clean_model, _, _ = run_fedavg(clients, 0.01, clean, seed=6)
        draws = reference_normals((6, 0, 0), 6)
        np.testing.assert_allclose(noisy_model.weights - clean_model.weights,
                                   params.tau * draws, rtol=1e-9, atol=1e-15)

    def test_negligible_noise_matches_clean_run(self):
        clients = random_clients([40, 40], dim=5, seed=16)
        params = PrivacyParams(epsilon=1e15, delta=1e-5)
        noisy = IterativeConfig(rounds=10, learning_rate=1e-4, dp=params)
        clean = IterativeConfig(rounds=10, learning_rate=1e-4)
        a, _, _ = run_fedavg(clients, 0.01, noisy, seed=7)
        b, _, _ = run_fedavg(clients, 0.01, clean, seed=7)
        np.testing.assert_allclose(a.weights, b.weights, rtol=1e-9, atol=1e-12)

    def test_clipping_caps_transmitted_delta(self):
        clients = random_clients([40], dim=5, seed=17)
        params = PrivacyParams(epsilon=1e9, delta=1e-5)
        # A step large enough that the one-round delta norm exceeds 1.
        noisy = IterativeConfig(rounds=1, learning_rate=2.0, local_epochs=1,
                                dp=params)
        clean = IterativeConfig(rounds=1, learning_rate=2.0, local_epochs=1)
        noisy_model, _, _ = run_fedavg(clients, 0.01, noisy, seed=8)
        clean_model, _, _ = run_fedavg(clients, 0.01, clean, seed=8)
        assert np.linalg.norm(clean_model.weights) > 1.5
        assert np.linalg.norm(noisy_model.weights) == pytest.approx(1.0, abs=1e-6)

    def test_deterministic_per_seed(self):
        clients = random_clients([30, 30], dim=4, seed=18)
        params = PrivacyParams(epsilon=1.0, delta=1e-5)
        config = IterativeConfig(rounds=5, learning_rate=1e-4, dp=params)
        a, _, _ = run_fedavg(clients, 0.01, config, seed=9)
        b, _, _ = run_fedavg(clients, 0.01, config, seed=9)
        c, _, _ = run_fedavg(clients, 0.01, config, seed=10)
        np.testing.assert_array_equal(a.weights, b.weights)
        assert not np.array_equal(a.weights, c.weights)


class TestGradientInsufficiency:
    def test_isotropic_gram_has_no_gap(self):
        targets = np.array([0.4, -1.1, 2.2])
        data = ClientDataset(features=np.eye(3), targets=targets)
        report = gradient_insufficiency_check([data], sigma=0.5)
        assert report.relative_gap < 1e-12
        assert report.eta_star == pytest.approx(1.0 / 1.5, rel=1e-12)

    def test_scaled_isotropic_gram(self):
        targets = np.array([1.0, 2.0, -0.5, 0.25])
        data = ClientDataset(features=2.0 * np.eye(4), targets=targets)
        report = gradient_insufficiency_check([data], sigma=1.0)
        assert report.relative_gap < 1e-12
        assert report.eta_star == pytest.approx(1.0 / 5.0, rel=1e-12)

    def test_zero_targets_degenerate(self):
        rng = np.random.default_rng(0)
        data = ClientDataset(features=rng.standard_normal((10, 3)),
                             targets=np.zeros(10))
        report = gradient_insufficiency_check([data], sigma=0.1)
        assert report == GradientGapReport(eta_star=0.0, relative_gap=0.0,
                                           weight_norm=0.0)

    def test_anisotropic_gap_matches_closed_form(self):
        clients = random_clients([60, 60], dim=10, seed=19)
        sigma = 0.01
        report = gradient_insufficiency_check(clients, sigma)
        pooled = np.vstack([c.features for c in clients])
        stacked = np.concatenate([c.targets for c in clients])
        gram = pooled.T @ pooled
        moment = pooled.T @ stacked
        weights = np.linalg.solve(gram + sigma * np.eye(10), moment)
        eta_star = float(moment @ weights) / float(moment @ moment)
        gap = float(np.linalg.norm(eta_star * moment - weights)
                    / np.linalg.norm(weights))
        assert report.eta_star == pytest.approx(eta_star, rel=1e-10)
        assert report.relative_gap == pytest.approx(gap, rel=1e-10)
        assert report.relative_gap > 1e-3
