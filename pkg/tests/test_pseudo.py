"""Tests for the keyed phase generators, disentangling identities, hybrid
distances, the rank distinguisher, and the inverse-root overlap bound."""

import itertools
from math import comb

import numpy as np
import pytest

from chslab.errors import ParameterError, PreconditionViolated
from chslab.linalg import RegisterShape, StateVector
from chslab.pseudo import (
    PrfsInput,
    PrfsKey,
    PrsKey,
    PseudoParams,
    check_perm_split,
    lemma_nice_T_check,
    lemma_prfs_type_check,
    onewayness_quantity,
    prfs_apply,
    prfs_hybrids,
    prs_apply,
    prs_hybrids,
    prs_multikey_hybrids,
    rank_attack,
)
from chslab.rng import stream_rng
from chslab.typespace import (
    PrefixParams,
    TypeVector,
    enumerate_types,
    is_l_fold_prefix_collision_free,
    type_state,
)


def random_state(rng, dim):
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(RegisterShape((dim,)), z / np.linalg.norm(z))


class TestPrsApply:
    def test_zero_key_is_identity(self):
        s = random_state(stream_rng(1), 8)
        out = prs_apply(PrsKey((0, 0, 0)), s)
        np.testing.assert_array_equal(out.amplitudes, s.amplitudes)

    def test_plus_to_minus(self):
        plus = StateVector(RegisterShape((2,)), np.array([1, 1]) / np.sqrt(2))
        out = prs_apply(PrsKey((1,)), plus)
        np.testing.assert_allclose(out.amplitudes, np.array([1, -1]) / np.sqrt(2))

    def test_involution(self):
        s = random_state(stream_rng(2), 16)
        k = PrsKey((1, 0, 1))
        np.testing.assert_allclose(prs_apply(k, prs_apply(k, s)).amplitudes,
                                   s.amplitudes, atol=1e-15)

    def test_unitary(self):
        rng = stream_rng(3)
        k = PrsKey.from_int(5, 3)
        a, b = random_state(rng, 8), random_state(rng, 8)
        ka, kb = prs_apply(k, a), prs_apply(k, b)
        assert abs(np.linalg.norm(ka.amplitudes) - 1) < 1e-12
        assert np.vdot(ka.amplitudes, kb.amplitudes) == pytest.approx(
            np.vdot(a.amplitudes, b.amplitudes), abs=1e-12)

    def test_phase_acts_on_leading_bits(self):
        # n=2, lam=1: key bit hits the most significant qubit
        s = StateVector(RegisterShape((4,)), np.array([0, 0, 1, 0], dtype=complex))
        out = prs_apply(PrsKey((1,)), s)  # |10>: leading bit 1 -> sign flip
        np.testing.assert_allclose(out.amplitudes, [0, 0, -1, 0])


class TestPrfsApply:
    def test_all_zero_blocks(self):
        s = random_state(stream_rng(4), 4)
        K = PrfsKey(2, (0,), (0,))
        for bits in ((0,), (1,)):
            out = prfs_apply(K, PrfsInput(bits), s)
            np.testing.assert_array_equal(out.amplitudes, s.amplitudes)

    def test_block_selection(self):
        s = random_state(stream_rng(5), 4)
        K = PrfsKey(2, (0b10,), (0b01,))
        np.testing.assert_allclose(
            prfs_apply(K, PrfsInput((0,)), s).amplitudes,
            prs_apply(PrsKey.from_int(0b10, 2), s).amplitudes)
        np.testing.assert_allclose(
            prfs_apply(K, PrfsInput((1,)), s).amplitudes,
            prs_apply(PrsKey.from_int(0b01, 2), s).amplitudes)

    def test_equal_blocks_collapse(self):
        s = random_state(stream_rng(6), 4)
        K = PrfsKey(2, (0b11,), (0b11,))
        np.testing.assert_array_equal(
            prfs_apply(K, PrfsInput((0,)), s).amplitudes,
            prfs_apply(K, PrfsInput((1,)), s).amplitudes)

    def test_xor_of_blocks(self):
        s = random_state(stream_rng(7), 8)
        K = PrfsKey(3, (0b101, 0b011), (0b110, 0b000))
        out = prfs_apply(K, PrfsInput((1, 0)), s)
        np.testing.assert_allclose(
            out.amplitudes,
            prs_apply(PrsKey.from_int(0b110 ^ 0b011, 3), s).amplitudes)


def dense_key_average_unit(v, sigma, p):
    """Independent oracle: build the full matrices and average over keys."""
    d = 2 ** (p.n + p.m)
    total = len(v)
    flat = lambda w: int(np.ravel_multi_index(w, (d,) * total))
    sv = tuple(v[s] for s in sigma)
    unit = np.zeros((d**total, d**total), dtype=complex)
    unit[flat(v), flat(sv)] = 1.0
    acc = np.zeros_like(unit)
    for key in range(2**p.n):
        diag = np.ones(d**total)
        for idx in range(d**total):
            digits = np.unravel_index(idx, (d,) * total)
            par = 0
            for j in range(p.ell):
                par ^= bin((digits[j] >> p.m) & key).count("1") & 1
            diag[idx] = -1.0 if par else 1.0
        acc += np.diag(diag) @ unit @ np.diag(diag)
    return acc / 2**p.n, unit


class TestPermSplit:
    def test_identity_permutation(self):
        p = PrefixParams(1, 1, 1, 2)
        assert check_perm_split((0b00, 0b10), (0, 1), p)

    def test_swap_across_fold_boundary(self):
        p = PrefixParams(1, 1, 1, 2)
        assert check_perm_split((0b00, 0b10), (1, 0), p)

    def test_swap_inside_fold(self):
        # pairwise XORs of {0,1,2} are 1, 2, 3: distinct 2-bit prefixes
        p = PrefixParams(2, 0, 2, 3)
        v = (0, 1, 2)
        assert is_l_fold_prefix_collision_free(
            TypeVector.from_elements(4, v), p)
        assert check_perm_split(v, (1, 0, 2), p)
        assert check_perm_split(v, (2, 1, 0), p)  # mixes fold and spectator

    def test_matches_dense_oracle(self):
        p = PrefixParams(2, 0, 1, 2)
        for v in [(0, 1), (0, 3), (1, 2)]:
            for sigma in itertools.permutations(range(2)):
                acc, unit = dense_key_average_unit(v, sigma, p)
                expected = unit if set(sigma[:1]) == {0} else np.zeros_like(unit)
                assert np.abs(acc - expected).max() < 1e-12
                assert check_perm_split(v, sigma, p)

    def test_rejects_bad_type(self):
        p = PrefixParams(2, 0, 1, 2)
        with pytest.raises(PreconditionViolated):
            check_perm_split((3, 3), (0, 1), p)

    def test_rejects_non_permutation(self):
        p = PrefixParams(2, 0, 1, 2)
        with pytest.raises(ParameterError):
            check_perm_split((0, 1), (0, 0), p)


class TestNiceTypeLemma:
    def test_explicit_two_element_type(self):
        # prefix 2, no suffix: splitting {0, 1} puts each element on one side
        p = PrefixParams(2, 0, 1, 2)
        T = TypeVector.from_elements(4, (0, 1))
        assert lemma_nice_T_check(T, p) < 1e-12

    def test_rhs_matrix_explicitly(self):
        p = PrefixParams(2, 0, 1, 2)
        T = TypeVector.from_elements(4, (0, 1))
        psi = type_state(T).amplitudes
        first = np.arange(16) // 4  # leading base-4 digit is the phased prefix
        lhs = np.zeros((16, 16), dtype=complex)
        for key in range(4):
            ph = np.array([(-1) ** (bin(f & key).count("1") & 1) for f in first])
            phased = ph * psi
            lhs += np.outer(phased, phased.conj())
        lhs /= 4
        e0, e1 = np.zeros(4, complex), np.zeros(4, complex)
        e0[0], e1[1] = 1.0, 1.0
        rhs = 0.5 * (np.outer(np.kron(e0, e1), np.kron(e0, e1).conj())
                     + np.outer(np.kron(e1, e0), np.kron(e1, e0).conj()))
        assert np.abs(lhs - rhs).max() < 1e-12
        assert lemma_nice_T_check(T, p) < 1e-12

    def test_full_fold_no_spectators(self):
        p = PrefixParams(2, 0, 2, 2)
        T = TypeVector.from_elements(4, (0, 1))
        assert lemma_nice_T_check(T, p) < 1e-12

    def test_refuses_bad_type(self):
        p = PrefixParams(1, 1, 1, 2)
        with pytest.raises(PreconditionViolated):
            lemma_nice_T_check(TypeVector.from_elements(4, (0, 1)), p)

    @pytest.mark.parametrize("n,m,ell,total", [
        (2, 0, 1, 2), (2, 0, 1, 3), (2, 1, 1, 2), (2, 1, 1, 3),
    ])
    def test_all_good_types(self, n, m, ell, total):
        d = 2 ** (n + m)
        p = PrefixParams(n, m, ell, total)
        count = 0
        for T in enumerate_types(d, total):
            if not is_l_fold_prefix_collision_free(T, p):
                continue
            assert lemma_nice_T_check(T, p) < 1e-12
            count += 1
        assert count > 0


class TestPrfsTypeLemma:
    def test_single_query_degenerates(self):
        p = PrefixParams(2, 0, 1, 2)
        T = TypeVector.from_elements(4, (0, 1))
        res = lemma_prfs_type_check(T, [(0,)], (1,), p)
        assert res.discrepancy == pytest.approx(lemma_nice_T_check(T, p),
                                                abs=1e-12)

    def test_two_queries_exact_enumeration(self):
        p = PrefixParams(1, 1, 2, 2)
        T = TypeVector.from_elements(4, (0b00, 0b10))
        res = lemma_prfs_type_check(T, [(0,), (1,)], (1, 1), p)
        assert res.exact_keys and res.keys_used == 4
        assert res.discrepancy < 1e-12

    def test_two_queries_wider_blocks(self):
        p = PrefixParams(2, 0, 2, 2)
        T = TypeVector.from_elements(4, (0, 1))
        res = lemma_prfs_type_check(T, [(0,), (1,)], (1, 1), p)
        assert res.exact_keys and res.keys_used == 16
        assert res.discrepancy < 1e-12

    def test_three_blocks_with_spectator(self):
        p = PrefixParams(2, 0, 2, 3)
        T = TypeVector.from_elements(4, (0, 1, 2))
        if is_l_fold_prefix_collision_free(T, p):
            res = lemma_prfs_type_check(T, [(0,), (1,)], (1, 1), p)
            assert res.discrepancy < 1e-12

    def test_rejects_repeated_queries(self):
        p = PrefixParams(1, 1, 2, 2)
        T = TypeVector.from_elements(4, (0b00, 0b10))
        with pytest.raises(PreconditionViolated):
            lemma_prfs_type_check(T, [(0,), (0,)], (1, 1), p)


class TestPrsHybrids:
    def test_no_generated_copies(self):
        res = prs_hybrids(PseudoParams(2, 2, 0, 2))
        assert res.td == 0.0

    def test_single_copy_no_spectators_is_exact(self):
        # one generated copy alone is already the maximally mixed moment
        res = prs_hybrids(PseudoParams(2, 2, 1, 0))
        assert res.td == pytest.approx(0.0, abs=1e-14)

    def test_frozen_values_and_decay(self):
        # block-diagonal pinch of the two-copy moment: the difference from
        # the product of one-copy moments has 1-norm 2(d-1)/(d(d+1))
        res2 = prs_hybrids(PseudoParams(2, 2, 1, 1))
        assert res2.td == pytest.approx(3 / 20, abs=1e-12)
        res3 = prs_hybrids(PseudoParams(3, 3, 1, 1))
        assert res3.td == pytest.approx(7 / 72, abs=1e-12)
        assert res3.td < res2.td
        assert res2.bound == (1 + 1) ** 2 / 4

    def test_keyed_state_contract(self):
        res = prs_hybrids(PseudoParams(2, 2, 1, 1))
        rho = res.keyed.entries
        assert np.abs(rho - rho.conj().T).max() < 1e-12
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.eigvalsh(rho).min() > -1e-9

    def test_partial_key_prefix(self):
        # lam < n exercises the proper-prefix path
        res = prs_hybrids(PseudoParams(1, 2, 1, 1))
        assert 0.0 < res.td <= 1.0

    def test_requires_n_at_least_lam(self):
        with pytest.raises(ParameterError):
            prs_hybrids(PseudoParams(3, 2, 1, 0))


class TestMultiKeyHybrids:
    def test_single_key_reduction(self):
        params = PseudoParams(2, 2, 1, 1)
        multi = prs_multikey_hybrids(params, 1)
        single = prs_hybrids(params)
        assert multi.td == pytest.approx(single.td, abs=1e-12)

    def test_two_keys_no_spectators(self):
        res = prs_multikey_hybrids(PseudoParams(2, 2, 1, 0), 2)
        assert 0.0 < res.td <= 1.0
        assert res.bound == 2 * (2 + 0) ** 2 / 4

    def test_nonincreasing_in_key_length(self):
        tds = [prs_multikey_hybrids(PseudoParams(lam, lam, 1, 0), 2).td
               for lam in (2, 3)]
        assert tds[1] <= tds[0] + 1e-12


class TestPrfsHybrids:
    def test_single_query_matches_single_key(self):
        pq = prfs_hybrids(PseudoParams(2, 3, 1, 1, (1,)), [(0,)])
        pk = prs_hybrids(PseudoParams(2, 3, 1, 1))
        assert pq.td == pytest.approx(pk.td, abs=1e-10)

    def test_zero_copies(self):
        res = prfs_hybrids(PseudoParams(2, 2, 0, 2, (0, 0)), [(0,), (1,)])
        assert res.td == 0.0

    def test_two_distinct_queries_exact(self):
        res = prfs_hybrids(PseudoParams(2, 2, 2, 0, (1, 1)), [(0,), (1,)])
        assert res.exact_keys and res.keys_used == 16
        assert 0.0 < res.td <= 1.0

    def test_repeated_queries_share_ideal_state(self):
        # the ideal side for two equal queries is the two-copy moment, so the
        # keyed side (identical phases on both copies) matches it more closely
        # than it matches a product of independent moments
        same = prfs_hybrids(PseudoParams(2, 2, 2, 0, (1, 1)), [(1,), (1,)])
        distinct = prfs_hybrids(PseudoParams(2, 2, 2, 0, (1, 1)), [(0,), (1,)])
        assert same.td < distinct.td + 1e-12


class TestRankAttack:
    def test_rank_formula_and_acceptance(self):
        res = rank_attack(PseudoParams(2, 2, 1, 2))
        assert res.rank1 == comb(4 + 1 - 1, 1) * comb(4 + 2 - 1, 2) == 40
        assert res.accept_pseudo == pytest.approx(1.0, abs=1e-9)
        assert res.accept_haar <= res.rank0 / res.rank1 + 1e-9
        assert res.ratio_bound == pytest.approx(
            4 / comb(3, 1) * (1 + 2 / 4), abs=1e-12)

    def test_custom_unitary_family_matches_default(self):
        params = PseudoParams(2, 2, 1, 1)
        phases = []
        idx = np.arange(4)
        for key in range(4):
            par = np.zeros(4, dtype=int)
            for bit in range(2):
                par ^= ((idx >> (1 - bit)) & 1) * ((key >> (1 - bit)) & 1)
            phases.append(np.diag(1.0 - 2.0 * par))
        default = rank_attack(params)
        explicit = rank_attack(params, unitaries=phases)
        assert default.rank0 == explicit.rank0
        assert default.accept_haar == pytest.approx(explicit.accept_haar,
                                                    abs=1e-10)

    def test_larger_point_keeps_inequality(self):
        res = rank_attack(PseudoParams(3, 3, 1, 1))
        assert res.accept_pseudo == pytest.approx(1.0, abs=1e-9)
        assert res.accept_haar <= res.rank0 / res.rank1 + 1e-9


class TestOnewayness:
    def test_bound_points(self):
        value, bound = onewayness_quantity(1, 1)
        assert bound == 1.0 and value <= bound + 1e-9
        value, bound = onewayness_quantity(2, 1)
        assert bound == 0.5 and value <= bound + 1e-9

    def test_no_spectators_is_tight(self):
        value, bound = onewayness_quantity(2, 0)
        assert bound == 0.25
        assert value == pytest.approx(0.25, abs=1e-12)
