"""Multiset combinatorics over an index alphabet and their quantum lifts.

A "type" is a multiset over ``[0, d)`` with total multiplicity ``t``.  Its
lift ``|T>`` is the uniform superposition over all arrangements of the
multiset, living on ``t`` registers of dimension ``d``.  Type states form
an orthonormal basis of the symmetric subspace of ``(C^d)^{(x)t}``, whose
dimension is ``C(d+t-1, t)``; averaging the projectors ``|T><T|`` over a
uniform type reproduces the exact t-th moment of a Haar-random state.

Types are stored sparsely (index -> multiplicity); full vectors are only
materialised by :func:`type_state`.  The canonical ordering of types is
lexicographic on the sorted element tuple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .errors import (
    DimensionOverflow,
    EnumerationTooLarge,
    NotCollisionFree,
    ParameterError,
)
from .linalg import DEFAULT_DIM_CAP, Operator, RegisterShape, StateVector
from .rng import stream_rng

__all__ = [
    "DEFAULT_ENUM_CAP",
    "TypeVector",
    "PrefixParams",
    "Bipartition",
    "GoodTypeProbability",
    "enumerate_types",
    "arrangements",
    "type_state",
    "sym_projector",
    "permutation_symmetrizer",
    "haar_moment",
    "sample_haar",
    "haar_states_block",
    "is_l_fold_prefix_collision_free",
    "prob_good_type",
    "type_bipartition",
]

DEFAULT_ENUM_CAP = 10**6


@dataclass(frozen=True)
class TypeVector:
    """Sparse multiset over ``[0, alphabet_dim)``."""

    alphabet_dim: int
    items: tuple[tuple[int, int], ...]  # sorted (index, multiplicity), no zeros

    def __post_init__(self) -> None:
        items = tuple(sorted((int(i), int(c)) for i, c in self.items))
        if any(c < 1 for _, c in items):
            raise ParameterError("multiplicities must be >= 1")
        if any(not 0 <= i < self.alphabet_dim for i, _ in items):
            raise ParameterError(f"index out of range for alphabet {self.alphabet_dim}")
        if len({i for i, _ in items}) != len(items):
            raise ParameterError("duplicate index in sparse type")
        object.__setattr__(self, "items", items)

    @classmethod
    def from_elements(cls, alphabet_dim: int, elements) -> "TypeVector":
        counts: dict[int, int] = {}
        for e in elements:
            counts[int(e)] = counts.get(int(e), 0) + 1
        return cls(alphabet_dim, tuple(counts.items()))

    @property
    def counts(self) -> dict[int, int]:
        return dict(self.items)

    @property
    def total(self) -> int:
        return sum(c for _, c in self.items)

    def elements(self) -> tuple[int, ...]:
        """Sorted element tuple with multiplicity."""
        return tuple(i for i, c in self.items for _ in range(c))

    def collision_free(self) -> bool:
        return all(c == 1 for _, c in self.items)

    def remove(self, other: "TypeVector") -> "TypeVector":
        counts = self.counts
        for i, c in other.items:
            if counts.get(i, 0) < c:
                raise ParameterError("not a sub-multiset")
            counts[i] -= c
            if counts[i] == 0:
                del counts[i]
        return TypeVector(self.alphabet_dim, tuple(counts.items()))


@dataclass(frozen=True)
class PrefixParams:
    """Bit-split of the index alphabet plus the fold and total-size parameters.

    ``n`` is the prefix bit length, ``m`` the suffix bit length; indices live
    in ``[0, 2^(n+m))`` and the prefix of ``x`` is ``x >> m``.  ``ell`` is the
    fold parameter and ``t`` the total multiplicity of the types considered.
    """

    n: int
    m: int
    ell: int
    t: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 0:
            raise ParameterError(f"need n >= 1 and m >= 0, got n={self.n}, m={self.m}")
        if not 1 <= self.ell <= self.t:
            raise ParameterError(f"need 1 <= ell <= t, got ell={self.ell}, t={self.t}")

    @property
    def alphabet_dim(self) -> int:
        return 2 ** (self.n + self.m)

    def prefix_of(self, index: int) -> int:
        return index >> self.m


def enumerate_types(d: int, t: int, enum_cap: int = DEFAULT_ENUM_CAP) -> list[TypeVector]:
    """All C(d+t-1, t) types over [0, d), in lexicographic element order."""
    if d < 1 or t < 0:
        raise ParameterError(f"bad alphabet/total: d={d}, t={t}")
    count = comb(d + t - 1, t)
    if count > enum_cap:
        raise EnumerationTooLarge(f"{count} types exceeds cap {enum_cap}")
    return [
        TypeVector.from_elements(d, combo)
        for combo in itertools.combinations_with_replacement(range(d), t)
    ]


def arrangements(elements: tuple[int, ...]):
    """Distinct permutations of a multiset, lexicographic order."""
    elements = tuple(elements)
    if not elements:
        yield ()
        return
    seen = set()
    for i, e in enumerate(elements):
        if e in seen:
            continue
        seen.add(e)
        for rest in arrangements(elements[:i] + elements[i + 1:]):
            yield (e,) + rest


def _flat_index(arrangement: tuple[int, ...], d: int) -> int:
    idx = 0
    for v in arrangement:
        idx = idx * d + v
    return idx


def type_state(T: TypeVector, cap: int = DEFAULT_DIM_CAP) -> StateVector:
    """Uniform superposition over all arrangements of the multiset."""
    d, t = T.alphabet_dim, T.total
    dim = d**t
    if dim > cap:
        raise DimensionOverflow(f"dimension {d}^{t} exceeds cap {cap}")
    amp = 1.0
    for _, c in T.items:
        amp *= factorial(c)
    amp = np.sqrt(amp / factorial(t))
    amps = np.zeros(dim, dtype=np.complex128)
    for arr in arrangements(T.elements()):
        amps[_flat_index(arr, d)] = amp
    return StateVector(RegisterShape((d,) * t), amps)


def sym_projector(d: int, t: int, cap: int = DEFAULT_DIM_CAP,
                  enum_cap: int = DEFAULT_ENUM_CAP) -> Operator:
    """Projector onto the permutation-invariant subspace of (C^d)^(x)t."""
    if d**t > cap:
        raise DimensionOverflow(f"dimension {d}^{t} exceeds cap {cap}")
    dim = d**t
    out = np.zeros((dim, dim), dtype=np.complex128)
    for T in enumerate_types(d, t, enum_cap):
        psi = type_state(T, cap).amplitudes
        out += np.outer(psi, psi.conj())
    return Operator(RegisterShape((d,) * t), out, hermitian_hint=True)


def permutation_symmetrizer(d: int, t: int, cap: int = DEFAULT_DIM_CAP) -> Operator:
    """The same projector built from the other direction: the group average
    of register-permutation operators.  Independent of the type-state route,
    so the two constructions can be checked against each other."""
    dim = d**t
    if dim > cap:
        raise DimensionOverflow(f"dimension {d}^{t} exceeds cap {cap}")
    idx = np.arange(dim)
    digits = [(idx // d ** (t - 1 - j)) % d for j in range(t)]
    out = np.zeros((dim, dim))
    for sigma in itertools.permutations(range(t)):
        dest = sum((digits[sigma[j]] * d ** (t - 1 - j) for j in range(t)),
                   start=np.zeros(dim, dtype=np.int64))
        out[dest, idx] += 1.0
    return Operator(RegisterShape((d,) * t), out / factorial(t), hermitian_hint=True)


def haar_moment(d: int, t: int, cap: int = DEFAULT_DIM_CAP,
                enum_cap: int = DEFAULT_ENUM_CAP) -> Operator:
    """Exact t-th moment of the projector onto a Haar-random state in C^d."""
    proj = sym_projector(d, t, cap, enum_cap)
    return Operator(proj.shape, proj.entries / comb(d + t - 1, t), hermitian_hint=True)


def haar_states_block(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Haar states as rows of a (count, d) array."""
    z = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sample_haar(d: int, seed: int, stream: int = 0) -> StateVector:
    """One Haar-random state in C^d, deterministic per (seed, stream)."""
    amps = haar_states_block(d, 1, stream_rng(seed, stream))[0]
    return StateVector(RegisterShape((d,)), amps)


def _prefix_xors_good(elements: tuple[int, ...], n: int, m: int, ell: int) -> bool:
    """True iff all position ell-subsets have pairwise distinct prefix XORs.

    Two subsets drawing equal elements from different positions share a XOR,
    so any repeated element rules the type out whenever ell < t; this is the
    reading under which the fold condition implies plain collision-freeness.
    """
    prefixes = [e >> m for e in elements]
    seen = set()
    for combo in itertools.combinations(range(len(elements)), ell):
        x = 0
        for i in combo:
            x ^= prefixes[i]
        if x in seen:
            return False
        seen.add(x)
    return True


def is_l_fold_prefix_collision_free(T: TypeVector, p: PrefixParams,
                                    enum_cap: int = DEFAULT_ENUM_CAP) -> bool:
    """Whether every fold of ``ell`` elements of T has a unique n-bit prefix XOR."""
    if T.alphabet_dim != p.alphabet_dim:
        raise ParameterError(
            f"alphabet {T.alphabet_dim} != 2^(n+m) = {p.alphabet_dim}")
    if T.total != p.t:
        raise ParameterError(f"type total {T.total} != params t={p.t}")
    if comb(T.total, p.ell) ** 2 > enum_cap:
        raise EnumerationTooLarge(
            f"C({T.total},{p.ell})^2 exceeds cap {enum_cap}")
    return _prefix_xors_good(T.elements(), p.n, p.m, p.ell)


@dataclass(frozen=True)
class GoodTypeProbability:
    exact: Fraction
    mc_estimate: float | None
    mc_stderr: float | None
    trials: int


def _sample_type_elements(d: int, t: int, count: int,
                          rng: np.random.Generator) -> np.ndarray:
    """Uniform multisets of size t over [0, d), one per row, sorted."""
    # stars-and-bars bijection: a sorted t-subset of [0, d+t-1) minus offsets
    vals = rng.random((count, d + t - 1))
    picked = np.sort(np.argpartition(vals, t - 1, axis=1)[:, :t], axis=1)
    return picked - np.arange(t)


def prob_good_type(p: PrefixParams, trials: int = 0, seed: int = 0, stream: int = 0,
                   enum_cap: int = DEFAULT_ENUM_CAP) -> GoodTypeProbability:
    """Probability that a uniform type of total t passes the fold predicate.

    The exact branch enumerates all types (raises EnumerationTooLarge past
    the cap).  When ``trials`` > 0 a Monte Carlo estimate over uniformly
    sampled types is attached, with its binomial standard error.
    """
    d, t = p.alphabet_dim, p.t
    types = enumerate_types(d, t, enum_cap)
    good = sum(
        1 for T in types if _prefix_xors_good(T.elements(), p.n, p.m, p.ell)
    )
    exact = Fraction(good, len(types))
    if trials <= 0:
        return GoodTypeProbability(exact, None, None, 0)
    rng = stream_rng(seed, stream)
    hits = 0
    remaining = trials
    while remaining > 0:
        chunk = min(remaining, 65536)
        rows = _sample_type_elements(d, t, chunk, rng)
        for row in rows:
            if _prefix_xors_good(tuple(int(v) for v in row), p.n, p.m, p.ell):
                hits += 1
        remaining -= chunk
    est = hits / trials
    stderr = float(np.sqrt(est * (1.0 - est) / trials))
    return GoodTypeProbability(exact, est, stderr, trials)


@dataclass(frozen=True)
class Bipartition:
    coefficient: float
    pairs: tuple[tuple[TypeVector, TypeVector], ...]


def type_bipartition(T: TypeVector, x: int) -> Bipartition:
    """Split |T> across the first x registers: uniform over x-subsets.

    Only defined for collision-free types; reconstructing
    sum coeff |X> (x) |T\\X| reproduces ``type_state(T)`` entrywise.
    """
    if not T.collision_free():
        raise NotCollisionFree(f"type {T.items} has repeated elements")
    if not 0 <= x <= T.total:
        raise ParameterError(f"need 0 <= x <= {T.total}, got {x}")
    elems = T.elements()
    pairs = []
    for sub in itertools.combinations(elems, x):
        left = TypeVector.from_elements(T.alphabet_dim, sub)
        pairs.append((left, T.remove(left)))
    return Bipartition(1.0 / np.sqrt(comb(T.total, x)), tuple(pairs))
