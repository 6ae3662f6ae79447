import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from betti2p.betti_formula import random_module
from betti2p.exact_linalg import DenseMatrix, PrimeField, rank, solve_matrix
from betti2p.grid_module import GradeMultiset, box_grades, free_module, gen_hook, gen_simple
from betti2p.resolution import build_cover
from betti2p.zigzag import (
    BWD,
    FWD,
    Barcode,
    ZigzagError,
    ZigzagModule,
    barcode,
    gen_from_barcode,
    generalized_rank,
    rank_table,
    restrict_into_frame,
    restrict_outward_frame,
    y_alpha,
    y_alpha_barcode,
    z_alpha,
    z_alpha_barcode,
)

FIG2 = [(1, 4), (2, 4), (1, 3), (1, 1), (2, 2), (3, 4), (1, 1), (2, 3)]


@st.composite
def barcodes(draw, max_len=6, max_bars=7):
    L = draw(st.integers(1, max_len))
    bars = draw(st.lists(st.tuples(st.integers(1, L), st.integers(1, L)).map(lambda t: (min(t), max(t))),
                         max_size=max_bars))
    dirs = draw(st.lists(st.sampled_from([FWD, BWD]), min_size=L - 1, max_size=L - 1))
    return Barcode(bars), dirs


def _random_invertible(d, f, rng):
    while True:
        a = DenseMatrix(rng.integers(0, f.p, size=(d, d)), f)
        if rank(a) == d:
            return a


def _rebase(z: ZigzagModule, rng) -> ZigzagModule:
    f = z.field
    P = [_random_invertible(d, f, rng) for d in z.dims]
    Pinv = [solve_matrix(p, DenseMatrix.identity(p.rows, f)) for p in P]
    maps = []
    for i, (m, d) in enumerate(z.maps):
        src, dst = (i, i + 1) if d == FWD else (i + 1, i)
        maps.append((P[dst] @ m @ Pinv[src], d))
    return ZigzagModule(f, z.dims, maps)


class TestBarcode:
    def test_single_vertex(self, F3):
        z = ZigzagModule(F3, [3], [])
        assert barcode(z) == Barcode([(1, 1)] * 3)

    def test_identity_edge(self, F2):
        z = ZigzagModule(F2, [1, 1], [(DenseMatrix.identity(1, F2), FWD)])
        assert barcode(z) == Barcode([(1, 2)])

    def test_zero_edge(self, F2):
        z = ZigzagModule(F2, [1, 1], [(DenseMatrix.zeros(1, 1, F2), BWD)])
        assert barcode(z) == Barcode([(1, 1), (2, 2)])

    def test_bad_shape(self, F2):
        z = ZigzagModule(F2, [1, 2], [(DenseMatrix.zeros(1, 1, F2), FWD)])
        with pytest.raises(ZigzagError):
            barcode(z)

    @pytest.mark.parametrize("dirs", list(itertools.product([FWD, BWD], repeat=3)))
    def test_fig2_all_directions(self, dirs, F2):
        z = gen_from_barcode(FIG2, list(dirs), F2)
        assert barcode(z) == Barcode(FIG2)

    def test_fig2_dims_match_bar_coverage(self, F2):
        z = gen_from_barcode(FIG2, [FWD, BWD, FWD], F2)
        # the listed bars cover vertex 4 three times
        assert list(z.dims) == [4, 5, 5, 3]
        bc = barcode(z)
        assert [bc.covering(i) for i in range(1, 5)] == list(z.dims)

    def test_non_split_zigzag(self, F3):
        # 1 -> 2 <- 1 with images spanning a common line: one long bar plus a point
        a = DenseMatrix([[1], [1]], F3)
        b = DenseMatrix([[2], [2]], F3)
        z = ZigzagModule(F3, [1, 2, 1], [(a, FWD), (b, BWD)])
        assert barcode(z) == Barcode([(1, 3), (2, 2)])

    @settings(max_examples=120, deadline=None)
    @given(barcodes(), st.sampled_from([2, 3, 5]))
    def test_round_trip(self, bd, p):
        bars, dirs = bd
        z = gen_from_barcode(bars, dirs, PrimeField(p))
        assert barcode(z) == bars

    @settings(max_examples=60, deadline=None)
    @given(barcodes(max_len=5, max_bars=6), st.integers(0, 2**32 - 1))
    def test_basis_change_invariance(self, bd, seed):
        bars, dirs = bd
        z = gen_from_barcode(bars, dirs, PrimeField(3))
        assert barcode(_rebase(z, np.random.default_rng(seed))) == bars

    @settings(max_examples=60, deadline=None)
    @given(barcodes(max_len=5), st.integers(0, 2**32 - 1))
    def test_rank_monotone(self, bd, seed):
        bars, dirs = bd
        z = _rebase(gen_from_barcode(bars, dirs, PrimeField(2)), np.random.default_rng(seed))
        r = rank_table(z)
        for (b, d), v in r.items():
            assert v >= generalized_rank(z, b - 1, d)
            assert v >= generalized_rank(z, b, d + 1)
            # generalized rank counts bars containing [b, d]
            assert v == sum(k for iv, k in bars.items() if iv.start <= b and d <= iv.end)

    def test_dimension_invariant_random_maps(self, F2):
        rng = np.random.default_rng(3)
        for _ in range(30):
            L = int(rng.integers(1, 6))
            dims = [int(v) for v in rng.integers(0, 4, size=L)]
            maps = []
            for i in range(L - 1):
                d = FWD if rng.integers(2) else BWD
                shape = (dims[i + 1], dims[i]) if d == FWD else (dims[i], dims[i + 1])
                maps.append((DenseMatrix(rng.integers(0, 2, size=shape), F2), d))
            z = ZigzagModule(F2, dims, maps)
            bc = barcode(z)
            assert [bc.covering(i) for i in range(1, L + 1)] == dims
            # rebuilding from the barcode gives an isomorphic module, so the same barcode
            assert barcode(gen_from_barcode(bc, z.directions, F2)) == bc


class TestGenFromBarcode:
    def test_single_bar(self, F2):
        for d in (FWD, BWD):
            z = gen_from_barcode([(1, 2)], [d], F2)
            assert list(z.dims) == [1, 1]
            assert z.maps[0][0] == DenseMatrix.identity(1, F2)

    def test_malformed(self, F2):
        with pytest.raises(ZigzagError):
            gen_from_barcode([(3, 2)], [FWD, FWD], F2)
        with pytest.raises(ZigzagError):
            gen_from_barcode([(1, 4)], [FWD], F2)


class TestFrames:
    def test_into_simple(self, F2):
        assert list(restrict_into_frame(gen_simple((0, 0), F2), (0, 0)).dims) == [0, 1, 0]

    def test_into_free(self, F2):
        z = restrict_into_frame(free_module(GradeMultiset([(0, 0)]), (2, 2), F2), (1, 1))
        assert list(z.dims) == [1, 1, 1]
        assert all(m == DenseMatrix.identity(1, F2) for m, _ in z.maps)
        assert z.directions == [FWD, BWD]

    def test_into_hook(self, F2):
        assert list(restrict_into_frame(gen_hook(F2), (1, 1)).dims) == [1, 0, 1]

    def test_outward_simple(self, F2):
        assert list(restrict_outward_frame(gen_simple((0, 0), F2), (0, 0)).dims) == [0, 1, 0]

    def test_outward_free_injective(self, F3):
        m = free_module(GradeMultiset([(0, 0), (1, 0), (1, 2)]), (3, 3), F3)
        for a in box_grades((4, 4)):
            z = restrict_outward_frame(m, a)
            assert all(rank(mat) == z.dims[1] for mat, _ in z.maps)

    def test_outward_hook(self, F2):
        z = restrict_outward_frame(gen_hook(F2), (0, 0))
        assert list(z.dims) == [1, 1, 1]
        assert z.directions == [BWD, FWD]
        assert all(m == DenseMatrix.identity(1, F2) for m, _ in z.maps)

    def test_y(self, F2):
        assert y_alpha(gen_simple((0, 0), F2), (0, 0)) == 1
        assert y_alpha(free_module(GradeMultiset([(0, 0)]), (2, 2), F2), (1, 1)) == 0
        hook = gen_hook(F2)
        assert y_alpha(hook, (0, 1)) == 0
        assert y_alpha(hook, (0, 0)) == 1

    def test_z(self, F2):
        assert z_alpha(gen_simple((0, 0), F2), (0, 0)) == 1
        m = free_module(GradeMultiset([(0, 0), (2, 1)]), (3, 3), F2)
        assert all(z_alpha(m, a) == 0 for a in box_grades((5, 5)))

    def test_z_of_kernel(self):
        m = random_module(np.random.default_rng(8), PrimeField(2), (3, 3), 3)
        k0 = build_cover(m).kernel
        assert all(z_alpha(k0, a) == 0 for a in k0.grades())

    @pytest.mark.parametrize("seed", range(8))
    def test_formula_and_barcode_routes_agree(self, seed):
        p = [2, 3, 5][seed % 3]
        m = random_module(np.random.default_rng(seed), PrimeField(p), (3, 3), 3)
        for a in box_grades((5, 5)):
            assert y_alpha(m, a) == y_alpha_barcode(m, a)
            assert z_alpha(m, a) == z_alpha_barcode(m, a)
