import numpy as np
import pytest

import gpdkit as gk
from gpdkit import corpus
from gpdkit.extensions import (CharacterData, GroupExtension, GroupTable,
                               abelian_basis, unit_root)

from oracles import group_algebra_blocks


def cyclic_table(n):
    els = [str(i) for i in range(n)]
    mul = {(str(a), str(b)): str((a + b) % n)
           for a in range(n) for b in range(n)}
    return els, mul


class TestGroupTable:
    def test_cyclic(self):
        els, mul = cyclic_table(6)
        G = GroupTable(els, mul)
        assert G.unit == "0"
        assert G.inv["2"] == "4"
        assert G.order("2") == 3
        assert G.power("5", 7) == "5"

    def test_rejects_broken_table(self):
        els, mul = cyclic_table(3)
        mul[("1", "1")] = "0"
        with pytest.raises(Exception, match="associativity"):
            GroupTable(els, mul)


class TestAbelianBasis:
    @pytest.mark.parametrize("orders", [(2,), (3,), (4,), (6,), (2, 2),
                                        (2, 4), (3, 3), (2, 2, 2), (12,)])
    def test_product_groups(self, orders):
        els = [t for t in np.ndindex(*orders)]
        ids = {t: repr(t) for t in els}
        mul = {(ids[a], ids[b]):
               ids[tuple((x + y) % d for x, y, d in zip(a, b, orders))]
               for a in els for b in els}
        G = GroupTable([ids[t] for t in els], mul)
        basis = abelian_basis(G)
        total = 1
        for _, d in basis:
            total *= d
        assert total == len(G)
        chars = CharacterData(G)
        assert len(chars.indices) == len(G)
        # orthogonality of the first nontrivial character against the sum
        if len(G) > 1:
            m = chars.indices[1]
            s = sum(chars.value(m, a) for a in G.elements)
            assert abs(s) < 1e-9

    def test_nonabelian_rejected(self):
        elements, mul, _ = corpus.heisenberg_elements(2)
        with pytest.raises(gk.NotAbelianKernel):
            abelian_basis(GroupTable(elements, mul))


class TestExtensionValidation:
    def test_non_normal_rejected(self):
        # S3 with a non-normal order-2 subgroup
        import itertools
        perms = list(itertools.permutations(range(3)))
        ids = {p: repr(p) for p in perms}
        mul = {(ids[p], ids[q]): ids[tuple(p[q[i]] for i in range(3))]
               for p in perms for q in perms}
        swap = ids[(1, 0, 2)]
        unit = ids[(0, 1, 2)]
        with pytest.raises(gk.NotNormal):
            GroupExtension.from_tables([ids[p] for p in perms], mul,
                                       [unit, swap])

    def test_nonabelian_kernel_rejected(self):
        elements, mul, _ = corpus.heisenberg_elements(2)
        with pytest.raises(gk.NotAbelianKernel):
            GroupExtension.from_tables(elements, mul, elements)


class TestHeisenbergExtension:
    @pytest.mark.parametrize("n", [2, 3])
    def test_factor_set_is_ab_prime(self, n):
        ext = corpus.heisenberg_extension(n)
        res = gk.group_extension_bundle(ext)
        assert res.passed
        for (h1, h2), f in res.factor_set.items():
            a = int(h1.strip("[]").split(",")[0])
            b2 = int(h2.strip("[]").split(",")[1])
            assert f == f"[0,0,{(a * b2) % n}]"

    @pytest.mark.parametrize("n", [2, 3])
    def test_cocycle_equals_closed_form_exactly(self, n):
        ext = corpus.heisenberg_extension(n)
        res = gk.group_extension_bundle(ext)
        for (g1, g2), val in res.cocycle.omega.items():
            h1, _ = res.action_groupoid.pairs[g1]
            h2, x2 = res.action_groupoid.pairs[g2]
            a = int(h1.strip("[]").split(",")[0])
            b2 = int(h2.strip("[]").split(",")[1])
            k = res.char_of_point[x2]
            expected = corpus.heisenberg_cocycle_closed_form(
                n, k[0] if k else 0, a, b2)
            assert val == expected  # bit-identical

    @pytest.mark.parametrize("n", [2, 3])
    def test_wedderburn_matches_oracle(self, n):
        elements, mul, _ = corpus.heisenberg_elements(n)
        oracle = group_algebra_blocks(elements, mul)
        res = gk.group_extension_bundle(corpus.heisenberg_extension(n))
        assert res.blocks_group == oracle
        assert res.blocks_twisted == oracle

    def test_central_action_is_trivial(self):
        # central kernel: the dual action fixes every character, so every
        # arrow of the action groupoid has equal source and range
        res = gk.group_extension_bundle(corpus.heisenberg_extension(3))
        G = res.action_groupoid.groupoid
        for gid in G.arrows:
            assert G.rng[gid] == G.src[gid]


class TestOtherExtensions:
    def test_split_z2z2_over_z2_has_trivial_cocycle(self):
        els = [f"({a},{b})" for a in range(2) for b in range(2)]
        mul = {(f"({a},{b})", f"({c},{d})"): f"({(a + c) % 2},{(b + d) % 2})"
               for a in range(2) for b in range(2)
               for c in range(2) for d in range(2)}
        ext = GroupExtension.from_tables(els, mul, ["(0,0)", "(0,1)"])
        res = gk.group_extension_bundle(ext)
        assert res.passed
        assert all(v == 1.0 for v in res.cocycle.omega.values())
        assert all(f == "(0,0)" for f in res.factor_set.values())

    def test_z4_over_2z4(self):
        els, mul = cyclic_table(4)
        ext = GroupExtension.from_tables(els, mul, ["0", "2"])
        res = gk.group_extension_bundle(ext)
        assert res.passed
        # oracle: the 4-element cyclic group algebra splits into 4 lines
        assert res.blocks_group == (1, 1, 1, 1)
        assert res.blocks_twisted == (1, 1, 1, 1)
        # the nontrivial character chi(2) = -1 shows up in the twist
        values = {complex(np.round(v, 12)) for v in res.cocycle.omega.values()}
        assert values == {1.0 + 0.0j, -1.0 + 0.0j}

    def test_s3_over_a3_nonCentral(self):
        # noncentral abelian kernel: the corrected factor set still
        # yields a valid cocycle and a certified isomorphism
        import itertools
        perms = list(itertools.permutations(range(3)))
        ids = {p: repr(p) for p in perms}
        mul = {(ids[p], ids[q]): ids[tuple(p[q[i]] for i in range(3))]
               for p in perms for q in perms}
        a3 = [ids[p] for p in perms
              if sum(1 for i, j in itertools.combinations(range(3), 2)
                     if p[i] > p[j]) % 2 == 0]
        ext = GroupExtension.from_tables([ids[p] for p in perms], mul, a3)
        res = gk.group_extension_bundle(ext)
        assert res.passed
        oracle = group_algebra_blocks([ids[p] for p in perms], mul)
        assert res.blocks_group == oracle == (2, 1, 1)


def test_unit_root_reduction():
    assert unit_root(17, 3) == unit_root(2, 3)
    assert unit_root(0, 5) == 1.0
