"""Two-party distinguishability of shared-state copies vs independent copies.

The lower bound is the collision tester: both parties measure every copy in
the computational basis and accept when all outcomes are distinct.  Its
advantage has an exact closed form in binomial ratios.  The upper bound goes
through measurements that stay positive under partial transposition: the
trace norm of the partially transposed difference is computed exactly in a
t-subset basis (dimension C(d,t)^2 per side instead of d^(2t)) and bounded
by a sum of Kneser-graph spectral norms.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .errors import EnumerationTooLarge, ParameterError
from .linalg import (
    DEFAULT_DIM_CAP,
    Operator,
    RegisterShape,
    partial_transpose,
    trace_distance,
    trace_norm,
)
from .rng import stream_rng
from .typespace import DEFAULT_ENUM_CAP, TypeVector, haar_moment, type_state

__all__ = [
    "KneserParams",
    "LoccParams",
    "kneser_adjacency",
    "kneser_one_norm",
    "locc_advantage_closed_form",
    "locc_advantage_mc",
    "ppt_diff_norm",
    "PptChainResult",
    "ppt_vs_haar_bound",
    "PptVsHaarResult",
]


@dataclass(frozen=True)
class KneserParams:
    """k-subsets of [v] with disjointness edges; v >= 2k so edges can exist."""

    v: int
    k: int

    def __post_init__(self) -> None:
        if self.k < 1 or self.v < 2 * self.k:
            raise ParameterError(f"need 1 <= k and v >= 2k, got v={self.v}, k={self.k}")


@dataclass(frozen=True)
class LoccParams:
    """Local dimension d, copies per party t, Monte Carlo budget."""

    d: int
    t: int
    trials: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.d < 2 or self.t < 0 or self.trials < 1:
            raise ParameterError("bad LOCC parameters")


def kneser_adjacency(kp: KneserParams, enum_cap: int = DEFAULT_ENUM_CAP) -> Operator:
    """0/1 adjacency matrix over the C(v,k) subsets, lexicographic order."""
    count = comb(kp.v, kp.k)
    if count > enum_cap:
        raise EnumerationTooLarge(f"{count} vertices exceeds cap {enum_cap}")
    subsets = [frozenset(s) for s in itertools.combinations(range(kp.v), kp.k)]
    out = np.zeros((count, count))
    for i, a in enumerate(subsets):
        for j in range(i + 1, count):
            if not (a & subsets[j]):
                out[i, j] = out[j, i] = 1.0
    return Operator(RegisterShape((count,)), out, hermitian_hint=True)


def _kneser_formula(v: int, k: int) -> float:
    prod = 1.0
    for j in range(1, k + 1):
        prod *= v - (2 * j - 1)
    return 2.0**k * prod / factorial(k)


def kneser_one_norm(kp: KneserParams,
                    enum_cap: int = DEFAULT_ENUM_CAP) -> tuple[float, float]:
    """(sum of absolute adjacency eigenvalues, closed-form value).

    The closed form 2^k (v-1)(v-3)...(v-2k+1) / k! is stated for v >= 2k+1;
    at v = 2k it degenerates to the perfect-matching count and still agrees.
    """
    exact = trace_norm(kneser_adjacency(kp, enum_cap))
    return exact, _kneser_formula(kp.v, kp.k)


def locc_advantage_closed_form(d: int, t: int) -> float:
    """Exact advantage of the no-collision tester, as a binomial-ratio rational."""
    if t < 0 or d < 2 * t or d < 1:
        raise ParameterError(f"need d >= 2t >= 0, got d={d}, t={t}")
    if t == 0:
        return 0.0
    independent = Fraction(comb(d, t) * comb(d - t, t), comb(d + t - 1, t) ** 2)
    identical = Fraction(comb(d, 2 * t), comb(d + 2 * t - 1, 2 * t))
    return float(independent - identical)


def _draw_outcomes(weights: np.ndarray, draws: int,
                   rng: np.random.Generator) -> np.ndarray:
    """Per-row categorical draws proportional to the row weights."""
    rows, d = weights.shape
    cum = np.cumsum(weights, axis=1)
    # the row offsets must be added in float64: float32 spacing at offset
    # ~8000 would quantize the within-row distribution
    unit = (cum / cum[:, -1:]).astype(np.float64)
    base = np.arange(rows, dtype=np.float64)[:, None]
    flat = (unit + base).ravel()
    needles = (rng.random((rows, draws)) + base).ravel()
    idx = np.searchsorted(flat, needles).reshape(rows, draws)
    return idx - (np.arange(rows)[:, None] * d)


def _all_distinct(outcomes: np.ndarray) -> np.ndarray:
    srt = np.sort(outcomes, axis=1)
    return (np.diff(srt, axis=1) != 0).all(axis=1)


def _mc_block(args) -> tuple[int, int]:
    """No-collision hit counts for one deterministic trial block.

    Per trial: the squared amplitudes of a fresh Haar state are drawn
    directly (i.i.d. exponentials, normalised) and every copy is measured
    in the computational basis; no density matrices are materialised.  The
    trials are paired: the shared-state branch measures 2t copies of one
    state, and the independent branch combines the first t of those
    outcomes with t outcomes from a second state.
    """
    seed, stream, block, rows, d, t = args
    rng = stream_rng(seed, (stream, block))
    # float32 weights: quantization perturbs outcome probabilities by ~1e-6
    # relative, far below any Monte Carlo stderr at reachable trial counts
    w = rng.standard_exponential((rows, d), dtype=np.float32)
    out_shared = _draw_outcomes(w, 2 * t, rng)
    hits_identical = int(_all_distinct(out_shared).sum())
    w = rng.standard_exponential((rows, d), dtype=np.float32)
    out_other = _draw_outcomes(w, t, rng)
    both = np.concatenate([out_shared[:, :t], out_other], axis=1)
    return hits_identical, int(_all_distinct(both).sum())


def locc_advantage_mc(lp: LoccParams, stream: int = 0, chunk: int = 8192,
                      workers: int | None = None) -> tuple[float, float]:
    """Monte Carlo estimate of the no-collision advantage with its stderr.

    Trials are split into fixed blocks, one RNG sub-stream per block, and
    the integer hit counts are summed, so the result is identical for any
    worker count.  The quoted stderr treats the branches as independent,
    which is conservative for the paired sampler.
    """
    if lp.t == 0:
        return 0.0, 0.0
    blocks = []
    remaining, block = lp.trials, 0
    while remaining > 0:
        rows = min(remaining, chunk)
        blocks.append((lp.seed, stream, block, rows, lp.d, lp.t))
        remaining -= rows
        block += 1
    if workers is None:
        workers = max(1, min(4, os.cpu_count() or 1))
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(_mc_block, blocks, chunksize=4))
    else:
        counts = [_mc_block(b) for b in blocks]
    hits_identical = sum(c[0] for c in counts)
    hits_independent = sum(c[1] for c in counts)
    p_id = hits_identical / lp.trials
    p_ind = hits_independent / lp.trials
    stderr = float(np.sqrt(
        p_id * (1 - p_id) / lp.trials + p_ind * (1 - p_ind) / lp.trials))
    return p_ind - p_id, stderr


@dataclass(frozen=True)
class PptChainResult:
    exact: float
    kneser_sum: float
    middle: float
    factorial_bound: float
    series_bound: float


def _subset_basis_pair(d: int, t: int, enum_cap: int):
    subsets = list(itertools.combinations(range(d), t))
    if len(subsets) ** 2 > enum_cap:
        raise EnumerationTooLarge(
            f"subset-pair basis C({d},{t})^2 exceeds cap {enum_cap}")
    return subsets, {s: i for i, s in enumerate(subsets)}


def ppt_diff_norm(d: int, t: int,
                  enum_cap: int = DEFAULT_ENUM_CAP) -> PptChainResult:
    """Exact partially transposed difference norm and its bound chain.

    Both mixtures are supported on pairs of t-subset states, so the 1-norm
    is computed in the C(d,t)^2-dimensional subset-pair basis (type states
    are orthonormal, and real, so transposition acts by index swap there).
    The chain reported is
    exact <= kneser_sum (= middle) <= factorial_bound <= series_bound.
    """
    if t < 0 or d <= 2 * t:
        raise ParameterError(f"need d > 2t >= 0, got d={d}, t={t}")
    subsets, index = _subset_basis_pair(d, t, enum_cap)
    S = len(subsets)
    weight_rho = 1.0 / (comb(d, 2 * t) * comb(2 * t, t))
    rho = np.zeros((S * S, S * S))
    sigma = np.zeros((S * S, S * S))
    for T in itertools.combinations(range(d), 2 * t):
        Tset = set(T)
        for X in itertools.combinations(T, t):
            u = index[tuple(sorted(Tset - set(X)))]
            x = index[X]
            for Y in itertools.combinations(T, t):
                v = index[tuple(sorted(Tset - set(Y)))]
                y = index[Y]
                rho[u * S + x, v * S + y] += weight_rho
    weight_sigma = 1.0 / (comb(d, t) * comb(d - t, t))
    for a, sa in enumerate(subsets):
        for b, sb in enumerate(subsets):
            if not (set(sa) & set(sb)):
                sigma[a * S + b, a * S + b] = weight_sigma

    def gamma(mat: np.ndarray) -> np.ndarray:
        return mat.reshape(S, S, S, S).transpose(0, 3, 2, 1).reshape(S * S, S * S)

    diff = gamma(rho) - gamma(sigma)
    exact = float(np.abs(np.linalg.eigvalsh(diff)).sum())

    kneser_sum = 0.0
    middle = 0.0
    factorial_bound = 0.0
    for s in range(t):
        norm, _ = kneser_one_norm(KneserParams(d - 2 * s, t - s), enum_cap)
        kneser_sum += comb(d, s) * comb(d - s, s) * norm
        denom = 1.0
        for j in range(t - s):
            denom *= d - 2 * s - 2 * j
        middle += (2.0 ** (t - s) * (factorial(t) / factorial(s)) ** 2
                   / (factorial(t - s) * denom))
        factorial_bound += (2.0 ** (t - s) * float(t) ** (2 * (t - s))
                            / (factorial(t - s) * (d - 2 * t + 2) ** (t - s)))
    kneser_sum *= weight_rho
    series_bound = float(np.expm1(2.0 * t * t / (d - 2 * t + 2)))
    return PptChainResult(exact, kneser_sum, middle, factorial_bound, series_bound)


@dataclass(frozen=True)
class PptVsHaarResult:
    advantage: float
    half_norm_surrogate: float
    half_norm_true: float | None
    slack_identical: float | None
    slack_independent: float | None
    slack_reference: float


def _subset_average_full(d: int, t: int, cap: int):
    """Average of |T><T| over t-subsets, materialised on the d^t space."""
    out = np.zeros((d**t, d**t), dtype=np.complex128)
    for sub in itertools.combinations(range(d), t):
        psi = type_state(TypeVector.from_elements(d, sub), cap).amplitudes
        out += np.outer(psi, psi.conj())
    return out / comb(d, t)


def ppt_vs_haar_bound(d: int, t: int, cap: int = DEFAULT_DIM_CAP,
                      enum_cap: int = DEFAULT_ENUM_CAP) -> PptVsHaarResult:
    """Bound pieces for distinguishing shared copies from independent ones.

    The surrogate half-norm comes from :func:`ppt_diff_norm`.  When d^(2t)
    fits the cap, the half-norm on the true moment states and the two
    collision slacks (distance from each true state to its subset surrogate)
    are computed exactly; otherwise only the constant-free reference t^2/d
    is reported for the slack.
    """
    if t == 0:
        return PptVsHaarResult(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    chain = ppt_diff_norm(d, t, enum_cap)
    advantage = locc_advantage_closed_form(d, t)
    slack_reference = t * t / d

    if d ** (2 * t) > cap:
        return PptVsHaarResult(advantage, chain.exact / 2.0, None, None, None,
                               slack_reference)

    shape = RegisterShape((d,) * (2 * t))
    rho = haar_moment(d, 2 * t, cap)
    rho = Operator(shape, rho.entries, hermitian_hint=True)
    sig_half = haar_moment(d, t, cap).entries
    sigma = Operator(shape, np.kron(sig_half, sig_half), hermitian_hint=True)
    b_regs = range(t, 2 * t)
    diff = Operator(shape,
                    partial_transpose(rho, b_regs).entries
                    - partial_transpose(sigma, b_regs).entries,
                    hermitian_hint=True)
    half_true = 0.5 * trace_norm(diff)

    rho_tilde = Operator(shape, _subset_average_full(d, 2 * t, cap),
                         hermitian_hint=True)
    sig_tilde = np.zeros_like(rho_tilde.entries)
    count = 0
    for sa in itertools.combinations(range(d), t):
        psi_a = type_state(TypeVector.from_elements(d, sa), cap).amplitudes
        rest = [x for x in range(d) if x not in sa]
        for sb in itertools.combinations(rest, t):
            psi_b = type_state(TypeVector.from_elements(d, sb), cap).amplitudes
            vec = np.kron(psi_a, psi_b)
            sig_tilde += np.outer(vec, vec.conj())
            count += 1
    sigma_tilde = Operator(shape, sig_tilde / count, hermitian_hint=True)
    slack_identical = trace_distance(rho, rho_tilde)
    slack_independent = trace_distance(sigma, sigma_tilde)
    return PptVsHaarResult(advantage, chain.exact / 2.0, half_true,
                           slack_identical, slack_independent, slack_reference)
