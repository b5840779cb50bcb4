"""Least-squares search for real rank-2 x rank-2 Hadamard factorizations.

A candidate factorization is parameterized by four 4x2 blocks:
A = ua @ va.T and B = ub @ vb.T, so both factors have rank <= 2 by
construction (16 parameters per factor; the minimal chart would need only
12, but the redundancy costs nothing and avoids coordinate patches).  The
objective is the squared Frobenius norm of A o B - C.

The default optimizer is multi-restart gradient descent with an Armijo
backtracking step (accepted steps never increase the objective); a
rand/1/bin differential-evolution mode is available as a second opinion.
All randomness flows from explicit seeds, split per target and restart,
so results do not depend on batch composition or scheduling.

Outcomes are evidence only: a converged run certifies expressibility up
to the achieved residual, while a failed run proves nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf2


class NonFiniteObjective(FloatingPointError):
    """The objective left the finite range (bad step-size configuration)."""


@dataclass(frozen=True)
class FactorPair:
    """Four 4x2 blocks; the factors are ua @ va.T and ub @ vb.T."""

    ua: np.ndarray
    va: np.ndarray
    ub: np.ndarray
    vb: np.ndarray

    def matrix_a(self) -> np.ndarray:
        return self.ua @ self.va.T

    def matrix_b(self) -> np.ndarray:
        return self.ub @ self.vb.T

    def product(self) -> np.ndarray:
        return self.matrix_a() * self.matrix_b()


@dataclass(frozen=True)
class OptConfig:
    restarts: int = 20
    iterations: int = 5000
    step0: float = 0.05
    step_growth: float = 1.25
    step_shrink: float = 0.5
    armijo_c: float = 1e-4
    line_search: bool = True
    success_tolerance: float = 1e-6  # on the Frobenius residual (1e-12 in squared norm)
    evidence_threshold: float = 1e-3  # residuals above this count as failure evidence
    method: str = "gd"  # "gd" or "de"
    de_population: int = 64
    de_weight: float = 0.8
    de_crossover: float = 0.9


@dataclass(frozen=True)
class OptReport:
    target: gf2.BitMatrix4
    restarts: int
    best_residual: float
    best_pair: FactorPair
    iterations_used: int
    converged: bool
    note: str = "evidence only"


def target_matrix(m: gf2.BitMatrix4) -> np.ndarray:
    """Binary target as a float (4, 4) array."""
    return gf2.to_rows(m).astype(np.float64)


def objective(p: FactorPair, c: np.ndarray) -> float:
    """Squared Frobenius norm of (ua va^T) o (ub vb^T) - c."""
    r = p.product() - np.asarray(c, dtype=np.float64)
    return float((r * r).sum())


def gradient(p: FactorPair, c: np.ndarray) -> FactorPair:
    """Analytic gradient of the objective, shaped like the parameters.

    With R = A o B - C: d/dua = 2 (R o B) va, d/dva = 2 (R o B)^T ua,
    and symmetrically with A for the second factor.
    """
    a = p.matrix_a()
    b = p.matrix_b()
    r = a * b - np.asarray(c, dtype=np.float64)
    rb = r * b
    ra = r * a
    return FactorPair(
        ua=2 * rb @ p.va,
        va=2 * rb.T @ p.ua,
        ub=2 * ra @ p.vb,
        vb=2 * ra.T @ p.ub,
    )


def _init_blocks(rng: np.random.Generator) -> list[np.ndarray]:
    return [rng.uniform(-1.0, 1.0, size=(4, 2)) / np.sqrt(2.0) for _ in range(4)]


def _restart_rng(seed: int, target: int, restart: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, target, restart]))


def _batch_objective(ua, va, ub, vb, c):
    a = ua @ va.transpose(0, 2, 1)
    b = ub @ vb.transpose(0, 2, 1)
    r = a * b - c
    return (r * r).sum(axis=(1, 2)), a, b, r


def _minimize_gd_batch(
    c: np.ndarray, seeds: list[tuple[int, int, int]], config: OptConfig
) -> tuple[np.ndarray, tuple[np.ndarray, ...], np.ndarray]:
    """Run every (target, restart) sample of the batch in lockstep.

    Samples never interact: each carries its own step size and accept
    decision, so results are identical however samples are batched.
    Returns final objectives, parameter tensors, and per-sample iteration
    counts (first iteration reaching the success tolerance, else the cap).
    """
    n = len(c)
    blocks = [_init_blocks(_restart_rng(*s)) for s in seeds]
    ua = np.stack([blk[0] for blk in blocks])
    va = np.stack([blk[1] for blk in blocks])
    ub = np.stack([blk[2] for blk in blocks])
    vb = np.stack([blk[3] for blk in blocks])

    step = np.full(n, config.step0)
    f, a, b, r = _batch_objective(ua, va, ub, vb, c)
    if not np.isfinite(f).all():
        raise NonFiniteObjective("objective non-finite at initialization")
    tol2 = config.success_tolerance**2
    iters_used = np.full(n, config.iterations, dtype=np.int64)

    for it in range(config.iterations):
        rb = r * b
        ra = r * a
        dua = 2 * rb @ va
        dva = 2 * rb.transpose(0, 2, 1) @ ua
        dub = 2 * ra @ vb
        dvb = 2 * ra.transpose(0, 2, 1) @ ub
        s = step[:, None, None]
        nua, nva, nub, nvb = ua - s * dua, va - s * dva, ub - s * dub, vb - s * dvb
        fn, an, bn, rn = _batch_objective(nua, nva, nub, nvb, c)

        if config.line_search:
            g2 = (
                (dua * dua).sum(axis=(1, 2))
                + (dva * dva).sum(axis=(1, 2))
                + (dub * dub).sum(axis=(1, 2))
                + (dvb * dvb).sum(axis=(1, 2))
            )
            accept = np.isfinite(fn) & (fn <= f - config.armijo_c * step * g2)
            step = np.where(accept, step * config.step_growth, step * config.step_shrink)
            np.maximum(step, 1e-20, out=step)
        else:
            if not np.isfinite(fn).all():
                raise NonFiniteObjective("objective diverged under the fixed step size")
            accept = np.ones(n, dtype=bool)

        am = accept[:, None, None]
        ua, va = np.where(am, nua, ua), np.where(am, nva, va)
        ub, vb = np.where(am, nub, ub), np.where(am, nvb, vb)
        a, b, r = np.where(am, an, a), np.where(am, bn, b), np.where(am, rn, r)
        f = np.where(accept, fn, f)

        hit = (f < tol2) & (iters_used == config.iterations)
        iters_used[hit] = it + 1

    return f, (ua, va, ub, vb), iters_used


def _assert_low_rank(pair: FactorPair) -> None:
    # Rank <= 2 holds by construction; this guards against numerical nonsense.
    for mat in (pair.matrix_a(), pair.matrix_b()):
        sv = np.linalg.svd(mat, compute_uv=False)
        if sv[2] > 1e-10 * sv[0]:
            raise AssertionError(f"factor exceeded rank 2: singular values {sv}")


def _reports_from_batch(
    words: list[int], f: np.ndarray, params, iters, config: OptConfig
) -> list[OptReport]:
    n_targets = len(words)
    restarts = config.restarts
    reports = []
    residuals = np.sqrt(f).reshape(n_targets, restarts)
    iters = iters.reshape(n_targets, restarts)
    for i, word in enumerate(words):
        j = int(np.argmin(residuals[i]))
        flat = i * restarts + j
        pair = FactorPair(*(t[flat].copy() for t in params))
        _assert_low_rank(pair)
        best = float(residuals[i, j])
        reports.append(
            OptReport(
                target=word,
                restarts=restarts,
                best_residual=best,
                best_pair=pair,
                iterations_used=int(iters[i, j]),
                converged=best < config.success_tolerance,
            )
        )
    return reports


def _optimize_words_gd(
    words: list[int], config: OptConfig, seed: int
) -> list[OptReport]:
    targets = np.stack([target_matrix(w) for w in words])
    c = np.repeat(targets, config.restarts, axis=0)
    seeds = [(seed, w, j) for w in words for j in range(config.restarts)]
    f, params, iters = _minimize_gd_batch(c, seeds, config)
    return _reports_from_batch(words, f, params, iters, config)


def _minimize_de(c: np.ndarray, config: OptConfig, rng: np.random.Generator):
    """rand/1/bin differential evolution on the flattened 32-parameter vector."""
    npop, dim = config.de_population, 32
    pop = rng.uniform(-1.0, 1.0, size=(npop, dim))

    def f_of(x: np.ndarray) -> np.ndarray:
        ua, va, ub, vb = (x[:, k * 8 : (k + 1) * 8].reshape(-1, 4, 2) for k in range(4))
        val, *_ = _batch_objective(ua, va, ub, vb, c[None])
        return val

    fit = f_of(pop)
    tol2 = config.success_tolerance**2
    evals = 0
    for gen in range(config.iterations):
        idx = np.argsort(rng.random((npop, npop - 1)), axis=1)  # permuted partners
        others = np.arange(npop)[:, None] <= idx
        idx = idx + others  # skip self
        r1, r2, r3 = idx[:, 0], idx[:, 1], idx[:, 2]
        mutant = pop[r1] + config.de_weight * (pop[r2] - pop[r3])
        cross = rng.random((npop, dim)) < config.de_crossover
        cross[np.arange(npop), rng.integers(0, dim, npop)] = True
        trial = np.where(cross, mutant, pop)
        ft = f_of(trial)
        better = ft <= fit
        pop[better] = trial[better]
        fit[better] = ft[better]
        evals = gen + 1
        if fit.min() < tol2:
            break
    best = pop[int(np.argmin(fit))]
    pair = FactorPair(*(best[k * 8 : (k + 1) * 8].reshape(4, 2).copy() for k in range(4)))
    return float(fit.min()), pair, evals


def _optimize_words_de(words: list[int], config: OptConfig, seed: int) -> list[OptReport]:
    reports = []
    for w in words:
        c = target_matrix(w)
        best_f, best_pair, best_iters = np.inf, None, config.iterations
        for j in range(config.restarts):
            f, pair, iters = _minimize_de(c, config, _restart_rng(seed, w, j))
            if f < best_f:
                best_f, best_pair, best_iters = f, pair, iters
        _assert_low_rank(best_pair)
        best = float(np.sqrt(best_f))
        reports.append(
            OptReport(
                target=w,
                restarts=config.restarts,
                best_residual=best,
                best_pair=best_pair,
                iterations_used=best_iters,
                converged=best < config.success_tolerance,
            )
        )
    return reports


def optimize_single(
    c: gf2.BitMatrix4, config: OptConfig | None = None, seed: int = 0
) -> OptReport:
    """Best factorization attempt for one binary target over all restarts."""
    config = config or OptConfig()
    if config.restarts < 1:
        raise ValueError("restarts must be >= 1")
    return evidence_batch([c], config, seed)[0]


def evidence_batch(
    targets: list[gf2.BitMatrix4], config: OptConfig | None = None, seed: int = 0
) -> list[OptReport]:
    """One report per target, in input order."""
    config = config or OptConfig()
    words = [gf2._check_word(w) for w in targets]
    if not words:
        return []
    if config.method == "de":
        return _optimize_words_de(words, config, seed)
    return _optimize_words_gd(words, config, seed)


def random_low_rank_signs(rng: np.random.Generator) -> np.ndarray:
    """Random rank <= 2 matrix with entries in {-1, 0, +1}.

    Averages two random +-1 outer products: each entry is (x + y)/2 with
    x, y = +-1, hence lands in {-1, 0, +1}, and the sum of two rank-1
    matrices has rank <= 2.
    """
    u1, v1, u2, v2 = (rng.choice((-1.0, 1.0), size=4) for _ in range(4))
    return (np.outer(u1, v1) + np.outer(u2, v2)) / 2.0


def positive_controls(
    count: int, seed: int, config: OptConfig | None = None
) -> list[tuple[gf2.BitMatrix4, OptReport]]:
    """Optimize binary targets that certainly admit a factorization.

    Each target is the support pattern of a random rank <= 2 sign matrix S:
    taking both factors equal to S reproduces the pattern exactly, so a
    healthy optimizer should reach a near-zero residual on nearly all of
    them.  Used to calibrate that failures elsewhere are informative.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    config = config or OptConfig()
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xC0]))
    words = []
    for _ in range(count):
        pattern = np.zeros((4, 4))
        while not pattern.any():
            pattern = (random_low_rank_signs(rng) != 0).astype(float)
        words.append(gf2.from_rows(pattern.astype(int)))
    reports = evidence_batch(words, config, seed)
    return list(zip(words, reports))


def planted_pair(s: np.ndarray) -> FactorPair:
    """A FactorPair reproducing sign matrix S as both factors, when rank(S) <= 2.

    Uses the SVD: S = U diag(sv) V^T with at most two nonzero singular
    values, split symmetrically between the blocks.
    """
    u, sv, vt = np.linalg.svd(np.asarray(s, dtype=np.float64))
    if sv[2:].max(initial=0.0) > 1e-9 * max(sv[0], 1e-30):
        raise ValueError("matrix has rank > 2")
    root = np.sqrt(sv[:2])
    block_u = u[:, :2] * root
    block_v = vt[:2].T * root
    return FactorPair(ua=block_u, va=block_v, ub=block_u.copy(), vb=block_v.copy())
