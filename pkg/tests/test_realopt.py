"""Real-valued factorization search: objective, gradient, optimizer behavior.

Also pins a mathematically important fact discovered by this optimizer:
GF(2)/integer counterexamples generally DO factor over the reals, where
reciprocal pairs (a * 1/a = 1) and free off-support values dissolve the
sign-enumeration obstruction.  An exact rational certificate for the
smallest counterexample word is frozen below.
"""

from fractions import Fraction

import numpy as np
import pytest

from hadex import gf2, realopt, zverify

EXAMPLE_WORD = 0x127F

# Exact certificate: the pattern 1111/1110/0100/1000 equals A o B with
# rank(A) = rank(B) = 2 over the rationals.
CERT_A = [
    [Fraction(1), Fraction(1), Fraction(1), Fraction(1)],
    [Fraction(2), Fraction(3), Fraction(1), Fraction(1)],
    [Fraction(1), Fraction(2), Fraction(0), Fraction(0)],
    [Fraction(1), Fraction(2), Fraction(0), Fraction(0)],
]
CERT_B = [
    [Fraction(1), Fraction(1), Fraction(1), Fraction(1)],
    [Fraction(1, 2), Fraction(1, 3), Fraction(1), Fraction(0)],
    [Fraction(0), Fraction(1, 2), Fraction(-3, 2), Fraction(3, 2)],
    [Fraction(1), Fraction(0), Fraction(4), Fraction(-2)],
]


def random_pair(rng) -> realopt.FactorPair:
    return realopt.FactorPair(*(rng.standard_normal((4, 2)) for _ in range(4)))


class TestObjective:
    def test_exact_fit_is_zero(self):
        ones = np.ones((4, 4))
        pair = realopt.planted_pair(ones)
        assert realopt.objective(pair, ones) < 1e-24

    def test_zero_parameters_leave_target_residual(self):
        zeros = realopt.FactorPair(*(np.zeros((4, 2)) for _ in range(4)))
        for word in (0x0000, 0x127F, 0xFFFF):
            c = realopt.target_matrix(word)
            assert realopt.objective(zeros, c) == pytest.approx(gf2.count_ones(word))

    def test_nonnegative(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            c = rng.standard_normal((4, 4))
            assert realopt.objective(random_pair(rng), c) >= 0.0


class TestGradient:
    def test_zero_at_exact_fit(self):
        ones = np.ones((4, 4))
        g = realopt.gradient(realopt.planted_pair(ones), ones)
        for block in (g.ua, g.va, g.ub, g.vb):
            assert np.abs(block).max() < 1e-12

    def test_matches_central_differences(self):
        rng = np.random.default_rng(22)
        h = 1e-6
        for _ in range(100):
            pair = random_pair(rng)
            c = rng.standard_normal((4, 4))
            analytic = realopt.gradient(pair, c)
            blocks = [pair.ua.copy(), pair.va.copy(), pair.ub.copy(), pair.vb.copy()]
            numeric = [np.zeros((4, 2)) for _ in range(4)]
            for k in range(4):
                for idx in np.ndindex(4, 2):
                    for sign in (1, -1):
                        shifted = [b.copy() for b in blocks]
                        shifted[k][idx] += sign * h
                        numeric[k][idx] += sign * realopt.objective(
                            realopt.FactorPair(*shifted), c
                        )
                    numeric[k][idx] /= 2 * h
            flat_a = np.concatenate([b.ravel() for b in (analytic.ua, analytic.va, analytic.ub, analytic.vb)])
            flat_n = np.concatenate([b.ravel() for b in numeric])
            rel = np.linalg.norm(flat_a - flat_n) / max(np.linalg.norm(flat_n), 1e-30)
            assert rel < 1e-5

    def test_linear_in_residual(self):
        # Doubling R (by moving the target) doubles the gradient at fixed A, B.
        rng = np.random.default_rng(23)
        pair = random_pair(rng)
        c1 = rng.standard_normal((4, 4))
        r = pair.product() - c1
        c2 = pair.product() - 2 * r
        g1 = realopt.gradient(pair, c1)
        g2 = realopt.gradient(pair, c2)
        for b1, b2 in zip((g1.ua, g1.va, g1.ub, g1.vb), (g2.ua, g2.va, g2.ub, g2.vb)):
            assert np.allclose(2 * b1, b2, rtol=1e-12, atol=1e-12)


class TestOptimizeSingle:
    def test_all_ones_converges(self):
        report = realopt.optimize_single(0xFFFF, realopt.OptConfig(restarts=4, iterations=2000))
        assert report.converged
        assert report.best_residual < 1e-6

    def test_planted_control_converges(self):
        rng = np.random.default_rng(24)
        s = realopt.random_low_rank_signs(rng)
        word = gf2.from_rows((s != 0).astype(int))
        report = realopt.optimize_single(word, realopt.OptConfig(restarts=8, iterations=3000))
        assert report.converged
        # The planted factors hit the target exactly.
        planted = realopt.planted_pair(s)
        assert realopt.objective(planted, realopt.target_matrix(word)) < 1e-24

    def test_factors_stay_rank_two(self):
        report = realopt.optimize_single(0x127F, realopt.OptConfig(restarts=4, iterations=1500))
        for mat in (report.best_pair.matrix_a(), report.best_pair.matrix_b()):
            sv = np.linalg.svd(mat, compute_uv=False)
            assert sv[2] < 1e-10 * sv[0]

    def test_deterministic_under_seed(self):
        config = realopt.OptConfig(restarts=3, iterations=500)
        r1 = realopt.optimize_single(0x127F, config, seed=5)
        r2 = realopt.optimize_single(0x127F, config, seed=5)
        assert r1.best_residual == r2.best_residual
        assert r1.iterations_used == r2.iterations_used
        assert (r1.best_pair.ua == r2.best_pair.ua).all()

    def test_independent_of_batch_composition(self):
        config = realopt.OptConfig(restarts=3, iterations=500)
        alone = realopt.optimize_single(0x127F, config, seed=5)
        batched = realopt.evidence_batch([0xFFFF, 0x127F, 0x12BF], config, seed=5)[1]
        assert alone.best_residual == batched.best_residual
        assert (alone.best_pair.ua == batched.best_pair.ua).all()

    def test_progress_is_monotone_in_iteration_budget(self):
        short = realopt.optimize_single(0x12F7, realopt.OptConfig(restarts=2, iterations=50), seed=3)
        long = realopt.optimize_single(0x12F7, realopt.OptConfig(restarts=2, iterations=800), seed=3)
        assert long.best_residual <= short.best_residual

    def test_fixed_step_can_go_non_finite(self):
        config = realopt.OptConfig(restarts=1, iterations=200, line_search=False, step0=10.0)
        with pytest.raises(realopt.NonFiniteObjective):
            realopt.optimize_single(0xFFFF, config)

    def test_rejects_zero_restarts(self):
        with pytest.raises(ValueError):
            realopt.optimize_single(0xFFFF, realopt.OptConfig(restarts=0))

    def test_report_carries_evidence_note(self):
        report = realopt.optimize_single(0xFFFF, realopt.OptConfig(restarts=1, iterations=100))
        assert report.note == "evidence only"


class TestPositiveControls:
    def test_all_nonzero_sign_matrix_maps_to_all_ones(self):
        s = np.ones((4, 4))
        assert gf2.from_rows((s != 0).astype(int)) == 0xFFFF

    def test_controls_converge(self):
        controls = realopt.positive_controls(
            25, seed=42, config=realopt.OptConfig(restarts=10, iterations=3000)
        )
        converged = sum(rep.converged for _, rep in controls)
        assert converged >= 23

    def test_rejects_zero_count(self):
        with pytest.raises(ValueError):
            realopt.positive_controls(0, seed=1)


class TestEvidenceBatch:
    def test_empty(self):
        assert realopt.evidence_batch([]) == []

    def test_order_preserved_with_planted_control(self):
        words = [0x127F, 0xFFFF, 0x12BF]
        reports = realopt.evidence_batch(
            words, realopt.OptConfig(restarts=4, iterations=2000), seed=1
        )
        assert [r.target for r in reports] == words
        assert reports[1].converged  # the planted all-ones control


class TestRealFactorability:
    """The optimizer's central discovery, pinned exactly."""

    def test_exact_certificate_reproduces_the_pattern(self):
        pattern = [[1, 1, 1, 1], [1, 1, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]
        prod = [[CERT_A[i][j] * CERT_B[i][j] for j in range(4)] for i in range(4)]
        assert prod == [[Fraction(x) for x in row] for row in pattern]
        assert gf2.from_rows(pattern) == EXAMPLE_WORD

    def test_exact_certificate_factors_have_rank_two(self):
        # Clear denominators so the exact integer rank routine applies.
        a_int = np.array([[int(x) for x in row] for row in CERT_A])
        b_int = np.array([[int(x * 6) for x in row] for row in CERT_B])
        assert zverify.rank_z(a_int) == 2
        assert zverify.rank_z(b_int) == 2

    def test_optimizer_finds_the_factorization(self):
        report = realopt.optimize_single(
            EXAMPLE_WORD, realopt.OptConfig(restarts=20, iterations=5000), seed=0
        )
        assert report.converged
        assert report.best_residual < 1e-6
        # The numerical factors genuinely multiply back to the pattern.
        assert np.abs(report.best_pair.product() - realopt.target_matrix(EXAMPLE_WORD)).max() < 1e-5


class TestDifferentialEvolution:
    def test_runs_and_is_deterministic(self):
        config = realopt.OptConfig(method="de", restarts=1, iterations=60)
        r1 = realopt.optimize_single(0xFFFF, config, seed=9)
        r2 = realopt.optimize_single(0xFFFF, config, seed=9)
        assert r1.best_residual == r2.best_residual

    def test_improves_over_random_population(self):
        config = realopt.OptConfig(method="de", restarts=1, iterations=2)
        coarse = realopt.optimize_single(0x127F, config, seed=9)
        config = realopt.OptConfig(method="de", restarts=1, iterations=200)
        fine = realopt.optimize_single(0x127F, config, seed=9)
        assert fine.best_residual < coarse.best_residual
