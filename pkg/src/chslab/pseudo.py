"""Keyed Pauli-Z state generators and their exact distinguishability data.

The generator family applies a diagonal phase ``(-1)^<k, prefix(y)>`` to the
amplitudes of an n-qubit state, with the key ``k`` read against the leading
bits of each basis label.  Because the generators are diagonal with +-1
entries, conjugating an operator ``M`` by the generator is the Hadamard
product of ``M`` with a +-1 phase-profile outer product; averaging over the
whole key space is therefore exact and cheap at desk scale.

Hybrid density matrices follow the register layout: generator-output copies
first (in query order, with multiplicities), shared-state copies last.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import (
    DimensionOverflow,
    ParameterError,
    PreconditionViolated,
    ShapeMismatch,
)
from .linalg import DEFAULT_DIM_CAP, Operator, RegisterShape, StateVector, \
    permute_registers, trace_distance
from .rng import stream_rng
from .typespace import (
    DEFAULT_ENUM_CAP,
    PrefixParams,
    TypeVector,
    haar_moment,
    is_l_fold_prefix_collision_free,
    type_state,
)

__all__ = [
    "PrsKey",
    "PrfsKey",
    "PrfsInput",
    "PseudoParams",
    "prs_apply",
    "prfs_apply",
    "check_perm_split",
    "lemma_nice_T_check",
    "lemma_prfs_type_check",
    "PrfsTypeResult",
    "prs_hybrids",
    "prs_multikey_hybrids",
    "prfs_hybrids",
    "HybridResult",
    "rank_attack",
    "RankAttackResult",
    "onewayness_quantity",
]


def _bits_to_int(bits) -> int:
    value = 0
    for b in bits:
        if b not in (0, 1):
            raise ParameterError(f"bit string contains {b!r}")
        value = (value << 1) | b
    return value


@dataclass(frozen=True)
class PrsKey:
    """lambda-bit key; bits[0] addresses the first (most significant) qubit."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        _bits_to_int(self.bits)

    @classmethod
    def from_int(cls, value: int, lam: int) -> "PrsKey":
        return cls(tuple((value >> (lam - 1 - i)) & 1 for i in range(lam)))

    @property
    def lam(self) -> int:
        return len(self.bits)

    @property
    def as_int(self) -> int:
        return _bits_to_int(self.bits)


@dataclass(frozen=True)
class PrfsKey:
    """Per-position key blocks: k0[i] is used when input bit i is 0, k1[i] when 1."""

    lambda_prime: int
    k0: tuple[int, ...]
    k1: tuple[int, ...]

    def __post_init__(self) -> None:
        top = 1 << self.lambda_prime
        if len(self.k0) != len(self.k1):
            raise ParameterError("k0 and k1 must hold one block per input position")
        if any(not 0 <= v < top for v in self.k0 + self.k1):
            raise ParameterError(f"key block out of range for lambda'={self.lambda_prime}")

    @property
    def m(self) -> int:
        return len(self.k0)

    @classmethod
    def from_int(cls, value: int, lambda_prime: int, m: int) -> "PrfsKey":
        # block layout, most significant first: k_1^0 ... k_m^0 k_1^1 ... k_m^1
        blocks = []
        for j in range(2 * m):
            shift = (2 * m - 1 - j) * lambda_prime
            blocks.append((value >> shift) & ((1 << lambda_prime) - 1))
        return cls(lambda_prime, tuple(blocks[:m]), tuple(blocks[m:]))

    def effective_key(self, x: "PrfsInput") -> int:
        if len(x.bits) != self.m:
            raise ParameterError(f"input length {len(x.bits)} != m={self.m}")
        e = 0
        for i, b in enumerate(x.bits):
            e ^= self.k1[i] if b else self.k0[i]
        return e


@dataclass(frozen=True)
class PrfsInput:
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        _bits_to_int(self.bits)


@dataclass(frozen=True)
class PseudoParams:
    """Shared parameter block for the hybrid experiments.

    ``lam`` is the key length (lambda' for the function-like generator), ``n``
    the state length in qubits, ``ell`` the number of generated copies, ``t``
    the number of shared-state copies.  ``ells`` carries the per-query copy
    counts for multi-query experiments and must sum to ``ell``.
    """

    lam: int
    n: int
    ell: int
    t: int
    ells: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.lam < 0 or self.n < 1 or self.ell < 0 or self.t < 0:
            raise ParameterError("negative parameter")
        if self.ells and sum(self.ells) != self.ell:
            raise ParameterError(f"per-query counts {self.ells} do not sum to ell={self.ell}")


def _parity(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    for s in (32, 16, 8, 4, 2, 1):
        a ^= a >> s
    return a & 1


def _prefix_xor_profile(d: int, suffix_shift: int, regs, total: int) -> np.ndarray:
    """XOR of the digit prefixes of the listed registers, per flat index."""
    idx = np.arange(d**total, dtype=np.int64)
    xp = np.zeros(d**total, dtype=np.int64)
    for j in regs:
        digit = (idx // d ** (total - 1 - j)) % d
        xp ^= digit >> suffix_shift
    return xp


def _phases(xp: np.ndarray, key: int) -> np.ndarray:
    return 1.0 - 2.0 * _parity(xp & key)


def prs_apply(k: PrsKey, s: StateVector) -> StateVector:
    """Phase the amplitudes by (-1)^<k, first lam bits of the basis label>."""
    n = int(s.dim).bit_length() - 1
    if 2**n != s.dim:
        raise ShapeMismatch(f"state dimension {s.dim} is not a power of two")
    if n < k.lam:
        raise ShapeMismatch(f"key length {k.lam} exceeds state length {n}")
    idx = np.arange(s.dim, dtype=np.int64)
    ph = _phases(idx >> (n - k.lam), k.as_int)
    return StateVector(s.shape, s.amplitudes * ph)


def prfs_apply(K: PrfsKey, x: PrfsInput, s: StateVector) -> StateVector:
    """Apply the generator with the XOR of the input-selected key blocks."""
    return prs_apply(PrsKey.from_int(K.effective_key(x), K.lambda_prime), s)


def _require_good(T: TypeVector, p: PrefixParams, enum_cap: int) -> None:
    if not is_l_fold_prefix_collision_free(T, p, enum_cap):
        raise PreconditionViolated(
            f"type {T.items} is not {p.ell}-fold {p.n}-prefix collision-free")


def check_perm_split(v, sigma, p: PrefixParams,
                     enum_cap: int = DEFAULT_ENUM_CAP) -> bool:
    """Key-average a permuted matrix unit and confirm it survives or vanishes.

    ``v`` is an arrangement of a fold-collision-free type; ``sigma`` permutes
    its positions.  Averaging the phased unit |v><sigma(v)| over all 2^n keys
    must reproduce the unit when sigma maps the first ell positions to
    themselves and the zero matrix otherwise.
    """
    v = tuple(int(e) for e in v)
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(len(v))):
        raise ParameterError(f"{sigma} is not a permutation of the positions")
    if len(v) != p.t:
        raise ParameterError(f"arrangement length {len(v)} != t={p.t}")
    T = TypeVector.from_elements(p.alphabet_dim, v)
    _require_good(T, p, enum_cap)

    sv = tuple(v[s] for s in sigma)
    # both sides are multiples of the same matrix unit, so the entrywise
    # comparison reduces to the single scalar carrying the key average
    xa = 0
    for e in v[: p.ell]:
        xa ^= p.prefix_of(e)
    xb = 0
    for e in sv[: p.ell]:
        xb ^= p.prefix_of(e)
    keys = np.arange(2**p.n, dtype=np.int64)
    avg = float(np.mean(1.0 - 2.0 * _parity(keys & (xa ^ xb))))
    expected = 1.0 if set(sigma[: p.ell]) == set(range(p.ell)) else 0.0
    return abs(avg - expected) <= 1e-12


def _position_subset_mixture(elements: tuple[int, ...], sizes: tuple[int, ...]):
    """Recursive uniform disjoint-subset sampling law, as exact weights.

    Yields ``((sub_1, ..., sub_q, rest), probability)`` where each ``sub_i``
    is a sorted element tuple of size ``sizes[i]`` drawn uniformly from what
    remains after the earlier draws.
    """
    terms: dict[tuple, float] = {}

    def rec(remaining: tuple[int, ...], chosen: tuple, weight: float, i: int) -> None:
        if i == len(sizes):
            key = chosen + (remaining,)
            terms[key] = terms.get(key, 0.0) + weight
            return
        total = comb(len(remaining), sizes[i])
        for pos in itertools.combinations(range(len(remaining)), sizes[i]):
            sub = tuple(remaining[j] for j in pos)
            rest = tuple(remaining[j] for j in range(len(remaining)) if j not in pos)
            rec(rest, chosen + (tuple(sorted(sub)),), weight / total, i + 1)

    rec(tuple(sorted(elements)), (), 1.0, 0)
    return terms.items()


def lemma_nice_T_check(T: TypeVector, p: PrefixParams,
                       cap: int = DEFAULT_DIM_CAP,
                       enum_cap: int = DEFAULT_ENUM_CAP) -> float:
    """Max-entry gap between the key-averaged type projector and the
    uniform split into an ell-subset times its complement.

    Both sides are computed independently: the left by exhaustive averaging
    over all 2^n keys applied to |T><T|, the right by subset enumeration.
    """
    _require_good(T, p, enum_cap)
    d, total, ell = T.alphabet_dim, T.total, p.ell
    if d**total > cap:
        raise DimensionOverflow(f"dimension {d}^{total} exceeds cap {cap}")

    psi = type_state(T, cap).amplitudes
    xp = _prefix_xor_profile(d, p.m, range(ell), total)
    lhs = np.zeros((psi.size, psi.size), dtype=np.complex128)
    for key in range(2**p.n):
        phased = _phases(xp, key) * psi
        lhs += np.outer(phased, phased.conj())
    lhs /= 2**p.n

    rhs = np.zeros_like(lhs)
    for (sub, rest), prob in _position_subset_mixture(T.elements(), (ell,)):
        left = type_state(TypeVector.from_elements(d, sub), cap).amplitudes
        right = type_state(TypeVector.from_elements(d, rest), cap).amplitudes
        vec = np.kron(left, right)
        rhs += prob * np.outer(vec, vec.conj())
    return float(np.abs(lhs - rhs).max())


@dataclass(frozen=True)
class PrfsTypeResult:
    discrepancy: float
    exact_keys: bool
    keys_used: int


def lemma_prfs_type_check(T: TypeVector, queries, mults, p: PrefixParams,
                          cap: int = DEFAULT_DIM_CAP,
                          enum_cap: int = DEFAULT_ENUM_CAP,
                          max_keys: int = DEFAULT_ENUM_CAP,
                          seed: int = 0) -> PrfsTypeResult:
    """Multi-query generalisation of :func:`lemma_nice_T_check`.

    The left side averages the q-block channel over the full key space
    (2^(2 m lambda') keys), or over a uniform key sample when that space
    exceeds ``max_keys``; the right side is the recursive disjoint-subset
    mixture.  Returns the max entry difference and the key-averaging mode.
    """
    queries = tuple(PrfsInput(tuple(q)) for q in queries)
    mults = tuple(int(v) for v in mults)
    if len(queries) != len(mults) or not queries:
        raise ParameterError("need one copy count per query")
    if len({q.bits for q in queries}) != len(queries):
        raise PreconditionViolated("queries must be pairwise distinct")
    m_in = len(queries[0].bits)
    if any(len(q.bits) != m_in for q in queries):
        raise ParameterError("queries must share one input length")
    ell = sum(mults)
    if p.ell != ell:
        raise ParameterError(f"params ell={p.ell} != sum of copy counts {ell}")
    _require_good(T, p, enum_cap)
    d, total = T.alphabet_dim, T.total
    if d**total > cap:
        raise DimensionOverflow(f"dimension {d}^{total} exceeds cap {cap}")

    lam = p.n
    key_bits = 2 * m_in * lam
    exact = 2**key_bits <= max_keys
    if exact:
        keys = range(2**key_bits)
        keys_used = 2**key_bits
    else:
        rng = stream_rng(seed, 0)
        keys_used = max_keys
        keys = [int(v) for v in
                rng.integers(0, 2**key_bits, size=keys_used, dtype=np.uint64)]

    # per-query XOR-prefix profiles over that query's block of registers
    offsets = np.cumsum((0,) + mults)
    profiles = [
        _prefix_xor_profile(d, p.m, range(offsets[j], offsets[j + 1]), total)
        for j in range(len(queries))
    ]
    psi = type_state(T, cap).amplitudes
    lhs = np.zeros((psi.size, psi.size), dtype=np.complex128)
    for key in keys:
        K = PrfsKey.from_int(key, lam, m_in)
        par = np.zeros(psi.size, dtype=np.int64)
        for j, x in enumerate(queries):
            par ^= _parity(profiles[j] & K.effective_key(x))
        phased = (1.0 - 2.0 * par) * psi
        lhs += np.outer(phased, phased.conj())
    lhs /= keys_used

    rhs = np.zeros_like(lhs)
    for parts, prob in _position_subset_mixture(T.elements(), mults):
        vec = np.ones(1, dtype=np.complex128)
        for part in parts:
            vec = np.kron(vec, type_state(
                TypeVector.from_elements(d, part), cap).amplitudes)
        rhs += prob * np.outer(vec, vec.conj())
    return PrfsTypeResult(float(np.abs(lhs - rhs).max()), exact, keys_used)


@dataclass(frozen=True)
class HybridResult:
    keyed: Operator
    ideal: Operator
    td: float
    bound: float


def _moment_entries(d: int, t: int, cap: int, enum_cap: int) -> np.ndarray:
    return haar_moment(d, t, cap, enum_cap).entries


def prs_hybrids(params: PseudoParams, cap: int = DEFAULT_DIM_CAP,
                enum_cap: int = DEFAULT_ENUM_CAP) -> HybridResult:
    """Exact keyed-output density matrix vs the fresh-state ideal.

    keyed: ell generated copies plus t shared copies, key averaged exactly
    over all 2^lam keys.  ideal: independent ell-copy and t-copy moments.
    The reported bound (ell+t)^(2 ell) / 2^lam carries no hidden constant.
    """
    lam, n, ell, t = params.lam, params.n, params.ell, params.t
    if n < lam:
        raise ParameterError(f"need n >= lam, got n={n}, lam={lam}")
    d = 2**n
    if d ** (ell + t) > cap:
        raise DimensionOverflow(f"dimension {d}^{ell + t} exceeds cap {cap}")
    shape = RegisterShape((d,) * (ell + t))

    M = _moment_entries(d, ell + t, cap, enum_cap)
    xp = _prefix_xor_profile(d, n - lam, range(ell), ell + t)
    G = np.zeros((d ** (ell + t),) * 2)
    for key in range(2**lam):
        ph = _phases(xp, key)
        G += np.outer(ph, ph)
    G /= 2**lam
    keyed = Operator(shape, M * G, hermitian_hint=True)

    ideal = Operator(shape, np.kron(_moment_entries(d, ell, cap, enum_cap),
                                    _moment_entries(d, t, cap, enum_cap)),
                     hermitian_hint=True)
    td = trace_distance(keyed, ideal)
    return HybridResult(keyed, ideal, td, (ell + t) ** (2 * ell) / 2**lam)


def prs_multikey_hybrids(params: PseudoParams, num_keys: int,
                         cap: int = DEFAULT_DIM_CAP,
                         enum_cap: int = DEFAULT_ENUM_CAP) -> HybridResult:
    """Same comparison with ``num_keys`` independent keys, each keying ell copies."""
    lam, n, ell, t = params.lam, params.n, params.ell, params.t
    if n < lam:
        raise ParameterError(f"need n >= lam, got n={n}, lam={lam}")
    if num_keys < 1:
        raise ParameterError("need at least one key")
    d = 2**n
    total = num_keys * ell + t
    if d**total > cap:
        raise DimensionOverflow(f"dimension {d}^{total} exceeds cap {cap}")
    shape = RegisterShape((d,) * total)

    M = _moment_entries(d, total, cap, enum_cap)
    profiles = [
        _prefix_xor_profile(d, n - lam, range(i * ell, (i + 1) * ell), total)
        for i in range(num_keys)
    ]
    G = np.zeros((d**total,) * 2)
    for key_tuple in itertools.product(range(2**lam), repeat=num_keys):
        par = np.zeros(d**total, dtype=np.int64)
        for i, key in enumerate(key_tuple):
            par ^= _parity(profiles[i] & key)
        ph = 1.0 - 2.0 * par
        G += np.outer(ph, ph)
    G /= (2**lam) ** num_keys
    keyed = Operator(shape, M * G, hermitian_hint=True)

    ideal_entries = np.ones((1, 1), dtype=np.complex128)
    block = _moment_entries(d, ell, cap, enum_cap)
    for _ in range(num_keys):
        ideal_entries = np.kron(ideal_entries, block)
    ideal_entries = np.kron(ideal_entries, _moment_entries(d, t, cap, enum_cap))
    ideal = Operator(shape, ideal_entries, hermitian_hint=True)
    td = trace_distance(keyed, ideal)
    bound = num_keys * (num_keys * ell + t) ** (2 * ell) / 2**lam
    return HybridResult(keyed, ideal, td, bound)


@dataclass(frozen=True)
class PrfsHybridResult:
    keyed: Operator
    ideal: Operator
    td: float
    bound: float
    exact_keys: bool
    keys_used: int


def prfs_hybrids(params: PseudoParams, queries,
                 cap: int = DEFAULT_DIM_CAP,
                 enum_cap: int = DEFAULT_ENUM_CAP,
                 max_keys: int = DEFAULT_ENUM_CAP,
                 seed: int = 0) -> PrfsHybridResult:
    """Multi-query keyed output vs per-query-independent ideal.

    Repeated query values share one ideal Haar state, matching the selective
    security game.  Key averaging is exhaustive up to ``max_keys`` keys and
    switches to uniform key sampling beyond that, with the mode reported.
    """
    lam, n, t = params.lam, params.n, params.t
    mults = params.ells if params.ells else (params.ell,)
    queries = tuple(PrfsInput(tuple(q)) for q in queries)
    if len(queries) != len(mults):
        raise ParameterError("need one query per copy count")
    if n < lam:
        raise ParameterError(f"need n >= lam', got n={n}, lam'={lam}")
    m_in = len(queries[0].bits) if queries else 0
    if any(len(q.bits) != m_in for q in queries):
        raise ParameterError("queries must share one input length")
    d = 2**n
    ell = sum(mults)
    total = ell + t
    if d**total > cap:
        raise DimensionOverflow(f"dimension {d}^{total} exceeds cap {cap}")
    shape = RegisterShape((d,) * total)

    key_bits = 2 * m_in * lam
    exact = 2**key_bits <= max_keys
    if exact:
        keys = range(2**key_bits)
        keys_used = 2**key_bits
    else:
        rng = stream_rng(seed, 0)
        keys_used = max_keys
        keys = [int(v) for v in
                rng.integers(0, 2**key_bits, size=keys_used, dtype=np.uint64)]

    M = _moment_entries(d, total, cap, enum_cap)
    offsets = np.cumsum((0,) + mults)
    profiles = [
        _prefix_xor_profile(d, n - lam, range(offsets[j], offsets[j + 1]), total)
        for j in range(len(queries))
    ]
    G = np.zeros((d**total,) * 2)
    for key in keys:
        K = PrfsKey.from_int(key, lam, m_in)
        par = np.zeros(d**total, dtype=np.int64)
        for j, x in enumerate(queries):
            par ^= _parity(profiles[j] & K.effective_key(x))
        ph = 1.0 - 2.0 * par
        G += np.outer(ph, ph)
    G /= keys_used
    keyed = Operator(shape, M * G, hermitian_hint=True)

    # ideal side: one Haar moment per distinct query value, then shared copies;
    # build on the grouped layout and permute back to query order
    order: dict[tuple[int, ...], list[int]] = {}
    for j, x in enumerate(queries):
        order.setdefault(x.bits, []).extend(
            range(int(offsets[j]), int(offsets[j + 1])))
    grouped_entries = np.ones((1, 1), dtype=np.complex128)
    grouped_regs: list[int] = []
    for regs in order.values():
        grouped_entries = np.kron(
            grouped_entries, _moment_entries(d, len(regs), cap, enum_cap))
        grouped_regs.extend(regs)
    grouped_entries = np.kron(grouped_entries, _moment_entries(d, t, cap, enum_cap))
    grouped_regs.extend(range(ell, total))
    grouped = Operator(RegisterShape((d,) * total), grouped_entries,
                       hermitian_hint=True)
    # grouped register g sits where query order expects grouped_regs[g]
    inverse = [0] * total
    for g, reg in enumerate(grouped_regs):
        inverse[reg] = g
    ideal = permute_registers(grouped, inverse)

    td = trace_distance(keyed, ideal)
    bound = (ell + t) ** (2 * ell) / 2**lam
    return PrfsHybridResult(keyed, ideal, td, bound, exact, keys_used)


@dataclass(frozen=True)
class RankAttackResult:
    rank0: int
    rank1: int
    accept_pseudo: float
    accept_haar: float
    ratio_bound: float


def rank_attack(params: PseudoParams, unitaries=None,
                rel_threshold: float = 1e-8,
                cap: int = DEFAULT_DIM_CAP,
                enum_cap: int = DEFAULT_ENUM_CAP) -> RankAttackResult:
    """Support-projector distinguisher against a single-copy generator family.

    ``unitaries`` may supply an arbitrary keyed family (one d x d unitary per
    key) to attack; by default the module's own phase generator is used.
    The measurement projects onto the numerical support of the keyed state
    and its acceptance of the ideal state is compared with rank0/rank1.
    """
    lam, n, ell, t = params.lam, params.n, params.ell, params.t
    d = 2**n
    total = ell + t
    if d**total > cap:
        raise DimensionOverflow(f"dimension {d}^{total} exceeds cap {cap}")

    if unitaries is None:
        rho0 = prs_hybrids(params, cap, enum_cap).keyed.entries
    else:
        if len(unitaries) != 2**lam:
            raise ParameterError(f"need one unitary per key, got {len(unitaries)}")
        M = _moment_entries(d, total, cap, enum_cap)
        rho0 = np.zeros_like(M)
        eye_t = np.eye(d**t)
        for u in unitaries:
            u = np.asarray(u, dtype=np.complex128)
            w = np.ones((1, 1), dtype=np.complex128)
            for _ in range(ell):
                w = np.kron(w, u)
            w = np.kron(w, eye_t)
            rho0 += w @ M @ w.conj().T
        rho0 /= 2**lam

    rho1 = np.kron(_moment_entries(d, ell, cap, enum_cap),
                   _moment_entries(d, t, cap, enum_cap))

    vals0, vecs0 = np.linalg.eigh(rho0)
    support = vals0 > rel_threshold * vals0.max()
    rank0 = int(support.sum())
    accept_pseudo = float(vals0[support].sum())
    basis = vecs0[:, support]
    accept_haar = float(np.real(np.einsum("ai,ab,bi->", basis.conj(), rho1, basis)))

    vals1 = np.linalg.eigvalsh(rho1)
    rank1 = int((np.abs(vals1) > rel_threshold * np.abs(vals1).max()).sum())

    ratio_bound = 2**lam / comb(ell + t, ell)
    for i in range(ell):
        ratio_bound *= 1.0 + t / (d + i)
    return RankAttackResult(rank0, rank1, accept_pseudo, accept_haar, ratio_bound)


def onewayness_quantity(n: int, m: int, cap: int = DEFAULT_DIM_CAP,
                        enum_cap: int = DEFAULT_ENUM_CAP,
                        cutoff: float = 1e-10) -> tuple[float, float]:
    """Average overlap of the phased moments against the inverse square root
    of their mixture; bounded by (m+1)/d for d = 2^n."""
    from .linalg import pinv_sqrt

    d = 2**n
    total = m + 1
    if d**total > cap:
        raise DimensionOverflow(f"dimension {d}^{total} exceeds cap {cap}")
    shape = RegisterShape((d,) * total)
    M = _moment_entries(d, total, cap, enum_cap)
    xp = _prefix_xor_profile(d, 0, (0,), total)

    rhos = []
    sigma = np.zeros_like(M)
    for x in range(d):
        ph = _phases(xp, x)
        rho_x = M * np.outer(ph, ph)
        rhos.append(rho_x)
        sigma += rho_x
    s = pinv_sqrt(Operator(shape, sigma, hermitian_hint=True), cutoff).entries

    value = 0.0
    for rho_x in rhos:
        value += float(np.real(np.trace(rho_x @ s @ rho_x @ s)))
    value /= d
    return value, total / d
