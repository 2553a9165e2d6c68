"""Tests for the brute-force verifiers: samplers, optimizers, stationarity."""

import numpy as np
import pytest

from bellres.bounds import (
    max_value_given_probustness,
    min_lambda1_for_value,
    min_renyi2_for_value,
)
from bellres.errors import InfeasibleConstraint
from bellres.oracles import (
    DEFAULT_SEED,
    SamplerConfig,
    default_rng,
    min_purity_nelder_mead,
    nelder_mead_max,
    resolve_seed,
    sample_constrained_states,
    sample_max_expectation,
    sample_spectra,
    stationarity_check,
)
from bellres.twoqubit import chsh_max_value, c_max

RT2 = np.sqrt(2.0)


class TestSeeding:
    def test_default(self):
        assert resolve_seed() == DEFAULT_SEED == 0xB311

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("BRB_SEED", "0x1234")
        assert resolve_seed() == 0x1234

    def test_explicit_wins(self, monkeypatch):
        monkeypatch.setenv("BRB_SEED", "7")
        assert resolve_seed(99) == 99

    def test_identical_streams(self):
        cfg = SamplerConfig(seed=5, count=50, constraint="fixed-lambda1", value=0.5)
        a = sample_spectra(cfg, 4)
        b = sample_spectra(cfg, 4)
        assert np.array_equal(a, b)


class TestSamplers:
    def test_fixed_lambda1_pure(self):
        cfg = SamplerConfig(seed=1, count=20, constraint="fixed-lambda1", value=1.0)
        for state in sample_constrained_states(cfg, 3):
            lam = np.linalg.eigvalsh(state.matrix)
            assert lam.max() == pytest.approx(1.0, abs=1e-9)

    def test_fixed_purity_maximally_mixed(self):
        cfg = SamplerConfig(seed=1, count=10, constraint="fixed-linear-purity", value=0.25)
        for state in sample_constrained_states(cfg, 4):
            assert np.abs(state.matrix - np.eye(4) / 4).max() <= 1e-9

    def test_fixed_lambda1_constraint_holds(self):
        cfg = SamplerConfig(seed=2, count=200, constraint="fixed-lambda1", value=0.6)
        spectra = sample_spectra(cfg, 4)
        assert np.abs(spectra[:, 0] - 0.6).max() <= 1e-12
        assert spectra.max(axis=1).max() <= 0.6 + 1e-9
        assert spectra.min() >= -1e-12
        assert np.abs(spectra.sum(axis=1) - 1.0).max() <= 1e-9

    def test_fixed_lambda1_near_uniform_fallback(self):
        # acceptance rate is tiny here; the shrink fallback must still
        # produce valid spectra
        d = 8
        lam1 = 1.0 / d + 0.01
        cfg = SamplerConfig(seed=3, count=5000, constraint="fixed-lambda1", value=lam1)
        spectra = sample_spectra(cfg, d)
        assert np.abs(spectra[:, 0] - lam1).max() <= 1e-12
        assert spectra.max(axis=1).max() <= lam1 + 1e-9
        assert np.abs(spectra.sum(axis=1) - 1.0).max() <= 1e-9

    def test_fixed_purity_constraint_holds(self):
        cfg = SamplerConfig(seed=4, count=200, constraint="fixed-linear-purity", value=0.5)
        spectra = sample_spectra(cfg, 4)
        assert np.abs((spectra**2).sum(axis=1) - 0.5).max() <= 1e-9
        assert spectra.min() >= -1e-12

    def test_states_are_valid(self):
        cfg = SamplerConfig(seed=6, count=50, constraint="none")
        for state in sample_constrained_states(cfg, 3):
            assert np.trace(state.matrix).real == pytest.approx(1.0, abs=1e-10)
            assert np.linalg.eigvalsh(state.matrix).min() >= -1e-10

    def test_infeasible_constraints(self):
        with pytest.raises(InfeasibleConstraint):
            sample_spectra(SamplerConfig(1, 5, "fixed-lambda1", 0.1), 4)
        with pytest.raises(InfeasibleConstraint):
            sample_spectra(SamplerConfig(1, 5, "fixed-linear-purity", 1.5), 4)
        with pytest.raises(InfeasibleConstraint):
            sample_spectra(SamplerConfig(1, 5, "bogus", 0.5), 4)


class TestDomination:
    def test_chsh_lambda1_06(self, chsh_op):
        cfg = SamplerConfig(seed=9, count=20000, constraint="fixed-lambda1", value=0.6)
        bound = 0.6 * 2 * RT2  # top two eigenvalues are 2*sqrt(2) and 0
        assert sample_max_expectation(chsh_op, cfg) <= bound + 1e-9


class TestNelderMeadMax:
    def test_concave_toy(self):
        x, v = nelder_mead_max(lambda z: -(z[0] - 0.5) ** 2, [[0.1], [0.9]])
        assert x[0] == pytest.approx(0.5, abs=1e-6)
        assert v == pytest.approx(0.0, abs=1e-10)

    def test_c_max_cross_check(self):
        lam1 = 0.75

        def f(z):
            c = min(max(z[0], 0.0), 4.0)
            return chsh_max_value(lam1, c)

        x, v = nelder_mead_max(f, [[1.0], [2.5], [3.9]])
        assert x[0] == pytest.approx(c_max(lam1), abs=1e-6)

    def test_rank_ansatz_cross_check(self):
        mu = np.array([4.0, 2.0, 1.0, -1.0])
        lam1 = 0.4
        closed = max_value_given_probustness(mu, 4 * lam1 - 1, 4).value

        def f(z):
            # remaining weight split by a softmax, penalized above lam1
            w = np.exp(z - z.max())
            rest = (1.0 - lam1) * w / w.sum()
            lam = np.concatenate([[lam1], rest])
            over = np.maximum(lam - lam1, 0.0)
            return float(lam @ mu) - 1e6 * float(over @ over)

        rng = default_rng(12)
        starts = rng.normal(size=(8, 3))
        _, v = nelder_mead_max(f, starts)
        # the quadratic penalty admits an overshoot of (mu_2 - mu_1)^2 / (4
        # * 1e6) = 2.5e-7 above the constrained optimum
        assert closed - 1e-8 <= v <= closed + 5e-7


class TestStationarity:
    def test_qubit_example(self):
        sol = min_renyi2_for_value([1.0, -1.0], 0.5, 2)
        assert stationarity_check(sol, [1.0, -1.0]) <= 1e-12

    def test_maximally_mixed_full_rank(self):
        mu = np.array([4.0, 2.0, 1.0, -1.0])
        sol = min_renyi2_for_value(mu, float(mu.mean()), 4)
        assert stationarity_check(sol, mu) <= 1e-12

    def test_probustness_spectra_not_stationary(self):
        mu = np.array([4.0, 2.0, 1.0, -1.0])
        sol = max_value_given_probustness(mu, 4 * 0.4 - 1, 4)
        assert stationarity_check(sol, mu) > 1e-3


class TestPurityOracle:
    def test_matches_closed_form(self):
        mu = np.array([3.0, 1.0, 0.0, -2.0])
        target = 1.8
        closed = float((min_renyi2_for_value(mu, target, 4).lambdas ** 2).sum())
        assert abs(min_purity_nelder_mead(mu, target, seed=17) - closed) <= 1e-6

    def test_respects_lambda1_route(self, chsh_op):
        # at the CHSH v = 0.2 point the minimal-purity state is rank 2
        from bellres.linalg import eig_hermitian

        mu = eig_hermitian(chsh_op).values
        sol = min_renyi2_for_value(mu, 2.2, 4)
        closed = float((sol.lambdas**2).sum())
        assert abs(min_purity_nelder_mead(mu, 2.2, seed=18) - closed) <= 1e-6
