"""Discrete rate-distortion machinery: solver oracles and properties."""

import math

import numpy as np
import pytest

from semsec import (
    DiscreteSemanticSource,
    DistortionMatrix,
    DomainError,
    InfeasibleError,
    Pmf,
    TwoConstraintSolver,
    binary_entropy,
    binary_rdf_joint,
    binary_rdf_obs,
    binary_rdf_sem,
    brute_force_rdf,
    hamming_distortion,
    modified_distortion,
    rdf_classic,
    rdf_semantic_case1,
    rdf_semantic_case2,
)
from semsec.rdf import _ba_tilted

# Frozen from the exhaustive grid search (resolution 6) on the doubly
# symmetric quarter-crossover source at Hamming targets (0.3, 0.25).
JOINT_CASE2_03_025 = 0.215816

FAST_SOLVER = TwoConstraintSolver(grid_size=14, refine_gap=1e-3)


def dsbs(alpha=0.25):
    return DiscreteSemanticSource.doubly_symmetric(alpha)


class TestSourceAndDistortion:
    def test_doubly_symmetric_structure(self):
        src = dsbs(0.25)
        np.testing.assert_allclose(src.marginal_s, [0.5, 0.5])
        np.testing.assert_allclose(src.marginal_u, [0.5, 0.5])
        np.testing.assert_allclose(
            src.joint.probs, [[0.375, 0.125], [0.125, 0.375]]
        )
        cond = src.p_s_given_u()
        np.testing.assert_allclose(cond.sum(axis=0), [1.0, 1.0])

    def test_zero_mass_symbols_pruned(self):
        joint = np.array([[0.25, 0.25, 0.0], [0.25, 0.25, 0.0]])
        src = DiscreteSemanticSource(Pmf(joint), tuple("ab"), tuple("xyz"))
        assert src.n_u == 2
        assert src.u_support == (0, 1)

    def test_hamming(self):
        d = hamming_distortion(2)
        np.testing.assert_allclose(d.entries, [[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(DomainError):
            DistortionMatrix(np.array([[-1.0, 0.0], [0.0, 1.0]]))

    def test_modified_distortion_is_affine_for_dsbs(self):
        src = dsbs(0.25)
        dhat = modified_distortion(src, hamming_distortion(2))
        np.testing.assert_allclose(
            dhat.entries, [[0.25, 0.75], [0.75, 0.25]], atol=1e-12
        )


class TestClassicRdf:
    def test_binary_closed_form(self):
        p = np.array([0.75, 0.25])
        for d in (0.05, 0.1, 0.2):
            point = rdf_classic(p, hamming_distortion(2), d)
            expected = binary_entropy(0.25) - binary_entropy(d)
            assert point.rate == pytest.approx(expected, abs=2e-4)
            assert point.distortions[0] <= d + 1e-6
            assert point.dual_bound <= point.rate + 1e-6

    def test_zero_rate_region(self):
        p = np.array([0.75, 0.25])
        point = rdf_classic(p, hamming_distortion(2), 0.3)
        assert point.rate == 0.0

    def test_below_floor_raises(self):
        p = np.array([0.75, 0.25])
        with pytest.raises(InfeasibleError):
            rdf_classic(p, hamming_distortion(2), -0.01)


class TestBaCore:
    def test_lagrangian_trace_nonincreasing(self):
        # The per-iteration rate need not be monotone, but the alternating
        # minimization drives the Lagrangian down at every step.
        p = np.array([0.3, 0.3, 0.4])
        rng = np.random.default_rng(5)
        tilt = 2.0 * rng.uniform(size=(3, 3))
        out = _ba_tilted(p, tilt, tol=1e-12, max_iter=500, return_trace=True)
        trace = out["trace"]
        assert len(trace) > 3
        assert np.all(np.diff(trace) <= 1e-10)

    def test_trace_rejected_for_batches(self):
        p = np.array([0.5, 0.5])
        with pytest.raises(DomainError):
            _ba_tilted(p, np.zeros((4, 2, 2)), return_trace=True)


class TestTwoConstraintSolver:
    def test_matches_classic_when_one_constraint_slack(self):
        src = dsbs(0.25)
        ham = hamming_distortion(2)
        point = rdf_semantic_case2(src, ham, ham, 0.15, 1.0, FAST_SOLVER)
        expected = 1.0 - binary_entropy(0.15)
        assert point.rate == pytest.approx(expected, abs=5e-3)

    def test_frozen_joint_oracle(self):
        point = rdf_semantic_case2(
            dsbs(0.25), hamming_distortion(2), hamming_distortion(2), 0.3, 0.25
        )
        assert point.rate == pytest.approx(JOINT_CASE2_03_025, abs=1e-3)
        assert point.dual_bound <= point.rate + 1e-6

    def test_monotone_in_targets(self):
        src = dsbs(0.25)
        ham = hamming_distortion(2)
        rates = [
            rdf_semantic_case2(src, ham, ham, d, d, FAST_SOLVER).rate
            for d in (0.1, 0.2, 0.35)
        ]
        assert rates[0] >= rates[1] - 1e-6
        assert rates[1] >= rates[2] - 1e-6

    def test_zero_rate_detected(self):
        src = dsbs(0.25)
        ham = hamming_distortion(2)
        point = rdf_semantic_case2(src, ham, ham, 0.5, 0.5, FAST_SOLVER)
        assert point.rate == 0.0
        assert point.multipliers == (0.0, 0.0)

    def test_infeasible_raises(self):
        src = dsbs(0.25)
        ham = hamming_distortion(2)
        with pytest.raises(InfeasibleError):
            rdf_semantic_case2(src, ham, ham, -0.05, 0.2, FAST_SOLVER)

    def test_case1_matches_modified_closed_form(self):
        src = dsbs(0.25)
        ham = hamming_distortion(2)
        point = rdf_semantic_case1(src, ham, ham, 0.35, 1.0, FAST_SOLVER)
        expected = 1.0 - binary_entropy((0.35 - 0.25) / 0.5)
        assert point.rate == pytest.approx(expected, abs=5e-3)

    def test_case1_floor(self):
        src = dsbs(0.25)
        ham = hamming_distortion(2)
        with pytest.raises(InfeasibleError):
            rdf_semantic_case1(src, ham, ham, 0.1, 0.5, FAST_SOLVER)


class TestBruteForce:
    def test_guards(self):
        src = dsbs(0.25)
        ham = hamming_distortion(2)
        with pytest.raises(DomainError):
            brute_force_rdf(src, ham, ham, 0.3, 0.3, case=2, grid=30)
        with pytest.raises(DomainError):
            brute_force_rdf(src, ham, ham, 0.3, 0.3, case=3)

    def test_agrees_with_solver_case2(self):
        src = dsbs(0.25)
        ham = hamming_distortion(2)
        brute = brute_force_rdf(src, ham, ham, 0.3, 0.25, case=2, grid=6)
        point = rdf_semantic_case2(src, ham, ham, 0.3, 0.25)
        # The grid search is an upper bound with a discretization excess.
        assert point.rate <= brute.rate + 5e-3
        assert brute.rate <= point.rate + 5e-3 + 0.02

    def test_agrees_with_solver_case1(self):
        src = dsbs(0.25)
        ham = hamming_distortion(2)
        brute = brute_force_rdf(src, ham, ham, 0.35, 0.3, case=1, grid=11)
        point = rdf_semantic_case1(src, ham, ham, 0.35, 0.3)
        assert point.rate <= brute.rate + 5e-3
        assert brute.rate <= point.rate + 5e-3 + 0.05


class TestBinaryClosedForms:
    def test_obs(self):
        assert binary_rdf_obs(0.25, 0.1) == pytest.approx(
            binary_entropy(0.25) - binary_entropy(0.1), abs=1e-15
        )
        assert binary_rdf_obs(0.25, 0.25) == 0.0
        assert binary_rdf_obs(0.25, 0.4) == 0.0

    def test_sem_case2(self):
        assert binary_rdf_sem(0.25, 0.11, 2) == pytest.approx(
            1.0 - binary_entropy(0.11), abs=1e-15
        )
        assert binary_rdf_sem(0.25, 0.6, 2) == 0.0

    def test_sem_case1(self):
        assert binary_rdf_sem(0.25, 0.35, 1) == pytest.approx(
            1.0 - binary_entropy(0.2), abs=1e-15
        )
        assert binary_rdf_sem(0.25, 0.1, 1) == float("inf")
        assert binary_rdf_sem(0.25, 0.5, 1) == 0.0
        # Degenerate crossover: formula guarded, only the saturated branch.
        assert binary_rdf_sem(0.5, 0.5, 1) == 0.0

    def test_joint_case1_is_max(self):
        for ds, du in [(0.3, 0.1), (0.4, 0.2), (0.26, 0.24)]:
            expected = max(binary_rdf_sem(0.25, ds, 1), binary_rdf_obs(0.25, du))
            assert binary_rdf_joint(0.25, ds, du, 1) == pytest.approx(expected, abs=1e-15)

    def test_joint_case1_infeasible(self):
        with pytest.raises(InfeasibleError):
            binary_rdf_joint(0.25, 0.1, 0.3, 1)

    def test_joint_case2_observation_only_reduction(self):
        # With the semantic constraint inactive the joint solver must land
        # on the classic rate for the (uniform) observable component.
        val = binary_rdf_joint(0.25, 0.5, 0.25, 2)
        assert val == pytest.approx(1.0 - binary_entropy(0.25), abs=5e-3)

    def test_joint_case2_dominates_marginals(self):
        # Sandwich against the exact marginal rates of the underlying
        # doubly symmetric source (both components are uniform bits).
        for ds, du in [(0.3, 0.25), (0.2, 0.2), (0.45, 0.1)]:
            joint = binary_rdf_joint(0.25, ds, du, 2)
            r_s = binary_rdf_sem(0.25, ds, 2)
            r_u = max(0.0, 1.0 - binary_entropy(min(du, 0.5)))
            assert joint >= max(r_s, r_u) - 5e-3
            assert joint <= r_s + r_u + 5e-3
