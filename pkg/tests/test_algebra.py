import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import gpdkit as gk
from gpdkit import corpus
from gpdkit.algebra import AlgebraElement, random_element

from oracles import group_algebra_blocks, group_convolution, \
    matrix_units_check

coeff3 = st.lists(st.floats(-5, 5), min_size=6, max_size=6)


def test_delta_convolution_point_masses(pair2):
    from gpdkit.groupoid import pair_id
    d12 = AlgebraElement.delta(pair2, pair_id(1, 2))
    d21 = AlgebraElement.delta(pair2, pair_id(2, 1))
    prod = gk.convolve(d12, d21)
    assert prod[pair_id(1, 1)] == 1.0
    assert np.count_nonzero(prod.coeffs) == 1
    # non-composable pair gives zero
    assert np.count_nonzero(gk.convolve(d12, d12).coeffs) == 0


def test_z3_generator_cubes_to_unit(z3):
    f = AlgebraElement.delta(z3, "g1")
    cubed = gk.convolve(gk.convolve(f, f), f)
    assert cubed["g0"] == 1.0
    assert np.count_nonzero(cubed.coeffs) == 1


def test_heis3_convolution_matches_group_oracle(heis3):
    rng = np.random.default_rng(11)
    elements, mul, unit = corpus.heisenberg_elements(3)
    inv = {a: next(b for b in elements if mul[(a, b)] == unit)
           for a in elements}
    for _ in range(5):
        f1 = random_element(heis3, rng)
        f2 = random_element(heis3, rng)
        d1 = {g: f1[g] for g in elements}
        d2 = {g: f2[g] for g in elements}
        expected = group_convolution(elements, mul, inv, d1, d2)
        got = gk.convolve(f1, f2)
        for g in elements:
            assert abs(got[g] - expected[g]) < 1e-12


def test_base_mismatch(pair2, z3):
    with pytest.raises(gk.BaseMismatch):
        gk.convolve(AlgebraElement.zero(pair2), AlgebraElement.zero(z3))


@settings(deadline=None, max_examples=25)
@given(coeff3)
def test_involution_is_involutive(vals):
    z3 = corpus.cyclic_groupoid(3)
    f = AlgebraElement(z3, [complex(vals[2 * i], vals[2 * i + 1])
                            for i in range(3)])
    assert np.allclose(gk.involute(gk.involute(f)).coeffs, f.coeffs)


@settings(deadline=None, max_examples=25)
@given(coeff3, coeff3)
def test_involution_antimultiplicative(a, b):
    z3 = corpus.cyclic_groupoid(3)
    f1 = AlgebraElement(z3, [complex(a[2 * i], a[2 * i + 1])
                             for i in range(3)])
    f2 = AlgebraElement(z3, [complex(b[2 * i], b[2 * i + 1])
                             for i in range(3)])
    lhs = gk.involute(gk.convolve(f1, f2))
    rhs = gk.convolve(gk.involute(f2), gk.involute(f1))
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-9)


def test_delta_involution(pair2):
    from gpdkit.groupoid import pair_id
    d = AlgebraElement.delta(pair2, pair_id(1, 2))
    assert gk.involute(d)[pair_id(2, 1)] == 1.0


class TestNorm:
    def test_unit_delta_norm_one(self, pair2):
        for u in pair2.units:
            assert gk.cstar_norm(pair2, AlgebraElement.delta(pair2, u)) == \
                pytest.approx(1.0, abs=1e-12)

    def test_all_ones_on_pair_has_norm_two(self, pair2):
        # oracle: each unit block is the 2x2 all-ones matrix, eigenvalues
        # {0, 2}, computed by hand
        f = AlgebraElement.from_dict(pair2, {g: 1.0 for g in pair2.arrows})
        assert gk.cstar_norm(pair2, f) == pytest.approx(2.0, abs=1e-12)

    def test_cstar_identity_on_heis3(self, heis3):
        rng = np.random.default_rng(0)
        for _ in range(100):
            f = random_element(heis3, rng)
            n = gk.cstar_norm(heis3, f)
            sq = gk.cstar_norm(heis3, gk.convolve(gk.involute(f), f))
            assert abs(sq - n * n) <= 1e-9 * max(n * n, 1.0)

    def test_submultiplicative_and_star_isometric(self, pair2, z3):
        rng = np.random.default_rng(3)
        for G in (pair2, z3):
            for _ in range(50):
                f1, f2 = random_element(G, rng), random_element(G, rng)
                n1, n2 = gk.cstar_norm(G, f1), gk.cstar_norm(G, f2)
                assert gk.cstar_norm(G, gk.convolve(f1, f2)) <= \
                    n1 * n2 + 1e-9
                assert abs(gk.cstar_norm(G, gk.involute(f1)) - n1) <= 1e-9

    def test_convolution_associativity_random(self, heis3):
        rng = np.random.default_rng(5)
        for _ in range(10):
            f1 = random_element(heis3, rng)
            f2 = random_element(heis3, rng)
            f3 = random_element(heis3, rng)
            lhs = gk.convolve(gk.convolve(f1, f2), f3)
            rhs = gk.convolve(f1, gk.convolve(f2, f3))
            scale = float(np.max(np.abs(lhs.coeffs))) or 1.0
            assert np.allclose(lhs.coeffs, rhs.coeffs,
                               rtol=1e-12, atol=1e-12 * scale)

    def test_convolution_distributive_random(self, heis3):
        rng = np.random.default_rng(7)
        for _ in range(10):
            f1 = random_element(heis3, rng)
            f2 = random_element(heis3, rng)
            f3 = random_element(heis3, rng)
            lhs = gk.convolve(f1 + f2, f3)
            rhs = gk.convolve(f1, f3) + gk.convolve(f2, f3)
            scale = float(np.max(np.abs(lhs.coeffs))) or 1.0
            assert np.allclose(lhs.coeffs, rhs.coeffs,
                               rtol=1e-12, atol=1e-12 * scale)


class TestPositivity:
    def test_squares_positive_on_pair(self, pair2):
        rng = np.random.default_rng(1)
        for _ in range(100):
            f = random_element(pair2, rng)
            assert gk.positivity_check(pair2,
                                       gk.convolve(gk.involute(f), f))

    def test_z3_indicator_combination_not_positive(self, z3):
        # oracle: character values 1 - 2cos(2 pi k / 3); k = 0 gives -1
        f = AlgebraElement.from_dict(z3, {"g0": 1.0, "g1": -1.0, "g2": -1.0})
        assert not gk.positivity_check(z3, f)
        rep = gk.RegularRepresentation(z3)
        eigs = np.linalg.eigvalsh(rep.matrices(f)[0])
        assert min(eigs) == pytest.approx(-1.0, abs=1e-9)

    def test_zero_is_positive(self, z3):
        assert gk.positivity_check(z3, AlgebraElement.zero(z3))


class TestConditionalExpectation:
    def test_identity_on_whole_groupoid(self, heis3):
        rng = np.random.default_rng(2)
        f = random_element(heis3, rng)
        out = gk.conditional_expectation(heis3, heis3, f)
        assert np.allclose(out.coeffs, f.coeffs)

    def test_restriction_to_center(self, heis3_quotient):
        G = heis3_quotient.domain
        K = gk.kernel(heis3_quotient).groupoid
        center = set(K.arrows)
        for g in G.arrows:
            out = gk.conditional_expectation(
                G, K, AlgebraElement.delta(G, g), embed=True)
            if g in center:
                assert out[g] == 1.0
            else:
                assert np.count_nonzero(out.coeffs) == 0

    def test_bimodule_property(self, heis3_quotient):
        G = heis3_quotient.domain
        K = gk.kernel(heis3_quotient).groupoid
        rng = np.random.default_rng(4)
        f = random_element(G, rng)
        a = gk.conditional_expectation(
            G, K, random_element(G, rng), embed=True)
        b = gk.conditional_expectation(
            G, K, random_element(G, rng), embed=True)
        lhs = gk.conditional_expectation(
            G, K, gk.convolve(gk.convolve(a, f), b), embed=True)
        rhs = gk.convolve(gk.convolve(
            a, gk.conditional_expectation(G, K, f, embed=True)), b)
        assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-10)

    def test_faithful_by_support(self, heis3_quotient):
        # Phi(f* f) at a unit u collects sum |f(g)|^2 over src(g) = u,
        # exhaustively over the delta basis
        G = heis3_quotient.domain
        K = gk.kernel(heis3_quotient).groupoid
        for g in G.arrows:
            f = AlgebraElement.delta(G, g)
            out = gk.conditional_expectation(
                G, K, gk.convolve(gk.involute(f), f), embed=True)
            assert out[G.src[g]] == 1.0

    def test_composition_with_unit_restriction(self, heis3_quotient):
        # restricting to the kernel then to the units equals restricting
        # to the units directly (a faithful composite)
        G = heis3_quotient.domain
        K = gk.kernel(heis3_quotient).groupoid
        rng = np.random.default_rng(6)
        f = random_element(G, rng)
        via_k = gk.conditional_expectation(G, K, f, embed=True)
        two_step = gk.conditional_expectation(G, list(G.units), via_k)
        one_step = gk.conditional_expectation(G, list(G.units), f)
        assert np.allclose(two_step.coeffs, one_step.coeffs)

    def test_rejects_non_subgroupoid(self, heis3):
        with pytest.raises(gk.NotASubgroupoid):
            gk.conditional_expectation(heis3, ["[1,0,0]", "[0,0,0]"],
                                       AlgebraElement.zero(heis3))


class TestWedderburn:
    def test_pair_groupoids_are_full_matrix_algebras(self):
        for n in range(2, 7):
            G = corpus.pair_groupoid(n)
            # independent oracle: the deltas are a full system of matrix
            # units, so the algebra is M_n
            assert matrix_units_check(G)
            assert gk.wedderburn(G).blocks == (n,)

    def test_cyclic_groups_are_diagonal(self):
        for k in range(1, 9):
            G = corpus.cyclic_groupoid(k)
            # oracle: commutativity forces k blocks of size 1
            assert all(G.comp[(a, b)] == G.comp[(b, a)]
                       for a in G.arrows for b in G.arrows)
            assert gk.wedderburn(G).blocks == tuple([1] * k)

    def test_heisenberg_blocks_match_enumeration_oracle(self):
        expected = {2: (2, 1, 1, 1, 1),
                    3: (3, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1)}
        for n in (2, 3):
            elements, mul, _ = corpus.heisenberg_elements(n)
            oracle = group_algebra_blocks(elements, mul)
            assert oracle == expected[n]
            got = gk.wedderburn(corpus.heisenberg_groupoid(n))
            assert got.blocks == expected[n]
            assert sum(b * b for b in got.blocks) == got.dimension == n ** 3
            assert got.center_dimension == len(got.blocks)

    def test_matrix_input_and_unitary_invariance(self, heis3):
        rep = gk.RegularRepresentation(corpus.cyclic_groupoid(4))
        mats = rep.basis_matrices()
        inv = gk.wedderburn(mats)
        assert inv.blocks == (1, 1, 1, 1)
        rng = np.random.default_rng(8)
        q, _ = np.linalg.qr(rng.standard_normal((4, 4))
                            + 1j * rng.standard_normal((4, 4)))
        conj = [q @ m @ q.conj().T for m in mats]
        assert gk.wedderburn(conj).blocks == (1, 1, 1, 1)

    def test_disjoint_union_blocks(self):
        G = corpus.disjoint_union([("a", corpus.pair_groupoid(2)),
                                   ("b", corpus.cyclic_groupoid(2))])
        assert gk.wedderburn(G).blocks == (2, 1, 1)

    def test_support_projection_compression(self):
        # the algebra unit may be a proper subprojection of the ambient
        # identity; M2 embedded in 3x3 with a dead corner
        mats = []
        for i in range(2):
            for j in range(2):
                m = np.zeros((3, 3), dtype=complex)
                m[i, j] = 1.0
                mats.append(m)
        inv = gk.wedderburn(mats)
        assert inv.blocks == (2,)
        e11 = np.zeros((2, 2), dtype=complex)
        e11[0, 0] = 1.0
        assert gk.wedderburn([e11]).blocks == (1,)

    def test_non_star_closed_family_rejected(self):
        n = np.zeros((2, 2), dtype=complex)
        n[0, 1] = 1.0  # span{N, N^2=0, I?}: closure is {N}, not *-closed
        with pytest.raises(ValueError, match="star|\\*-closed|unit"):
            gk.wedderburn([n])


def test_faithfulness_on_corpus(pair2, z3, heis3):
    for G in (pair2, z3, heis3):
        assert gk.faithfulness_defect(G) == 0


def test_numerical_degeneracy_after_retry_budget(z3):
    from gpdkit.algebra import wedderburn_from_tables
    rep = gk.RegularRepresentation(z3)
    products = {(z3.index[a], z3.index[b]): {z3.index[c]: 1.0}
                for (a, b), c in z3.comp.items()}
    with pytest.raises(gk.NumericalDegeneracy):
        wedderburn_from_tables(rep.basis_matrices(), products, retries=0)
