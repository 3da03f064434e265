import numpy as np
import pytest

import vinberg_cones as vc
from vinberg_cones.errors import AlgebraMismatchError, DimensionMismatchError, SpecError

from _support import max_block_error, rank2_cone, rank3_cone


def alg2(dim_w=1):
    return rank2_cone(dim_w).algebra


def alg3(dim_v=1, mult=1):
    return rank3_cone(dim_v, mult).algebra


class TestAlgebraConstruction:
    def test_rank2_dims(self):
        a = alg2(1)
        assert a.dim((1, 2)) == 1
        assert a.herm_dim == 3

    def test_rank2_herm_dim_counts_all_coordinates(self):
        assert alg2(9).herm_dim == 11

    def test_rank2_indefinite_flag(self):
        a = vc.rank2_algebra(vc.MetricSpace.canonical(1, 1))
        assert not a.is_euclidean

    def test_rank3_dims(self):
        a = alg3(1)
        assert a.herm_dim == 6  # 3 + 1 + 1 + 1

    def test_rank3_octonionic_dimension(self):
        # 3 + 8 + 8 + 8 = 27, the dimension of 3x3 octonionic Hermitian matrices
        assert alg3(8).herm_dim == 27

    def test_rank3_product_matches_clifford_mult(self):
        a = alg3(4)
        mod = a.clifford
        rng = np.random.default_rng(0)
        for _ in range(20):
            s0 = rng.normal(size=mod.dim_s)
            v = rng.normal(size=mod.dim_v)
            np.testing.assert_allclose(
                a.mult(s0, v), vc.clifford_mult(mod, v, s0), atol=1e-13
            )

    def test_rank3_product_isometry(self):
        a = alg3(4)
        rng = np.random.default_rng(1)
        for _ in range(100):
            s0 = rng.uniform(-1, 1, a.dim((1, 2)))
            v = rng.uniform(-1, 1, a.dim((2, 3)))
            out = a.mult(s0, v)
            lhs = a.ip((1, 3), out, out)
            rhs = a.ip((1, 2), s0, s0) * a.ip((2, 3), v, v)
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_rank3_requires_equal_spinor_dims(self):
        mod = vc.build_clifford_module(2)
        with pytest.raises(DimensionMismatchError):
            vc.CliffordModule(
                mod.v_space, mod.s0_space, vc.MetricSpace.euclidean(3), np.zeros((2, 3, 2))
            )


class TestDualAlgebra:
    def test_rank2_dual_keeps_dims(self):
        a = alg2(5)
        d = vc.dual_algebra(a)
        assert d.dim((1, 2)) == 5

    @pytest.mark.parametrize("dim_v,mult", [(2, 1), (1, 2)])
    def test_rank3_dual_permutes_slots(self, dim_v, mult):
        a = alg3(dim_v, mult)
        mod = a.clifford
        d = vc.dual_algebra(a)
        assert d.dim((1, 2)) == mod.dim_v
        assert d.dim((1, 3)) == mod.dim_s
        assert d.dim((2, 3)) == mod.dim_s
        assert d.kind == "rank3-dual"

    def test_dual_is_involution_object_level(self):
        a = alg3(3)
        assert vc.dual_algebra(vc.dual_algebra(a)) is a

    def test_dual_product_reverses_order(self):
        a = alg3(4)
        d = vc.dual_algebra(a)
        rng = np.random.default_rng(2)
        v = rng.normal(size=d.dim((1, 2)))
        s0 = rng.normal(size=d.dim((2, 3)))
        np.testing.assert_allclose(d.mult(v, s0), a.mult(s0, v), atol=1e-14)


class TestTriangularProduct:
    @pytest.mark.parametrize("algebra", [alg2(3), alg3(2)])
    def test_identity_is_unit(self, algebra):
        rng = np.random.default_rng(3)
        A = vc.random_triangular(algebra, rng)
        I = vc.identity_triangular(algebra)
        assert max_block_error(vc.triangular_product(A, I), A) == 0.0
        assert max_block_error(vc.triangular_product(I, A), A) == 0.0

    @pytest.mark.parametrize("algebra", [alg2(4), alg3(4)])
    def test_associativity(self, algebra):
        rng = np.random.default_rng(4)
        for _ in range(25):
            A, B, C = (vc.random_triangular(algebra, rng) for _ in range(3))
            left = vc.triangular_product(vc.triangular_product(A, B), C)
            right = vc.triangular_product(A, vc.triangular_product(B, C))
            assert max_block_error(left, right) <= 1e-12

    def test_rank2_example(self):
        a = alg2(1)
        A = vc.TriangularElement(a, [1.0, 2.0], {(1, 2): [1.0]})
        I = vc.identity_triangular(a)
        assert max_block_error(vc.triangular_product(A, I), A) == 0.0

    def test_algebra_mismatch_rejected(self):
        rng = np.random.default_rng(5)
        A = vc.random_triangular(alg2(2), rng)
        B = vc.random_triangular(alg2(3), rng)
        with pytest.raises(AlgebraMismatchError):
            vc.triangular_product(A, B)

    def test_anti_transpose_is_antihomomorphism(self):
        a = alg3(4)
        rng = np.random.default_rng(6)
        for _ in range(10):
            A = vc.random_triangular(a, rng)
            B = vc.random_triangular(a, rng)
            lhs = vc.anti_transpose_triangular(vc.triangular_product(A, B))
            rhs = vc.triangular_product(
                vc.anti_transpose_triangular(B), vc.anti_transpose_triangular(A)
            )
            assert max_block_error(lhs, rhs) <= 1e-12


class TestOrbitMap:
    def test_identity_maps_to_identity(self):
        a = alg3(1)
        X = vc.herm_from_triangular(vc.identity_triangular(a))
        np.testing.assert_array_equal(X.diag, np.ones(3))
        for k in a.offdiag_keys:
            np.testing.assert_array_equal(X.offdiag[k], 0.0)

    def test_rank2_hand_example(self):
        # A = [[1, 1], [0, 2]] -> A A^* = [[2, 2], [2, 4]]
        a = alg2(1)
        A = vc.TriangularElement(a, [1.0, 2.0], {(1, 2): [1.0]})
        X = vc.herm_from_triangular(A)
        np.testing.assert_allclose(X.diag, [2.0, 4.0])
        np.testing.assert_allclose(X.offdiag[(1, 2)], [2.0])

    def test_rank3_star_orbit_matches_anti_transpose_route(self):
        # A^* A computed directly equals t'(t'(A) t'(A)^*)
        a = alg3(4)
        rng = np.random.default_rng(7)
        for _ in range(20):
            A = vc.random_triangular(a, rng)
            direct = vc.herm_from_triangular_star(A)
            B = vc.anti_transpose_triangular(A)
            routed = vc.anti_transpose(vc.herm_from_triangular(B))
            np.testing.assert_allclose(
                direct.to_vector(), routed.to_vector(), atol=1e-12
            )

    def test_requires_positive_diagonal(self):
        a = alg2(1)
        A = vc.TriangularElement(a, [1.0, -2.0], {})
        assert not A.in_group
        with pytest.raises(SpecError):
            vc.herm_from_triangular(A)

    def test_last_diagonal_is_square(self):
        a = alg3(2)
        rng = np.random.default_rng(8)
        for _ in range(20):
            A = vc.random_triangular(a, rng)
            X = vc.herm_from_triangular(A)
            assert X.diag[-1] == pytest.approx(A.diag[-1] ** 2)
            assert X.diag[-1] > 0


class TestAntiTranspose:
    def test_identity_fixed(self):
        a = alg3(1)
        X = vc.herm_identity(a)
        Y = vc.anti_transpose(X)
        np.testing.assert_array_equal(Y.diag, np.ones(3))

    def test_rank2_diag_swap(self):
        a = alg2(2)
        X = vc.HermMatrix(a, [1.0, 5.0], {(1, 2): [0.5, -0.5]})
        Y = vc.anti_transpose(X)
        np.testing.assert_array_equal(Y.diag, [5.0, 1.0])
        np.testing.assert_array_equal(Y.offdiag[(1, 2)], [0.5, -0.5])

    def test_involution(self):
        a = alg3(3)
        rng = np.random.default_rng(9)
        X = vc.herm_from_triangular(vc.random_triangular(a, rng))
        back = vc.anti_transpose(vc.anti_transpose(X))
        assert back.algebra is a
        np.testing.assert_array_equal(back.to_vector(), X.to_vector())

    def test_preserves_pairing(self):
        a = alg3(2)
        rng = np.random.default_rng(10)
        for _ in range(10):
            X = vc.herm_from_triangular(vc.random_triangular(a, rng))
            Y = vc.herm_from_triangular(vc.random_triangular(a, rng))
            lhs = vc.herm_pairing(X, Y)
            rhs = vc.herm_pairing(vc.anti_transpose(X), vc.anti_transpose(Y))
            assert lhs == pytest.approx(rhs, rel=1e-13)


class TestVectorAndJson:
    def test_vector_roundtrip(self):
        a = alg3(2)
        rng = np.random.default_rng(11)
        X = vc.herm_from_triangular(vc.random_triangular(a, rng))
        Y = vc.herm_from_vector(a, X.to_vector())
        np.testing.assert_array_equal(Y.to_vector(), X.to_vector())

    def test_json_roundtrip(self):
        a = alg3(1)
        X = vc.HermMatrix(a, [2.0, 2.0, 2.0], {(1, 2): [1.0], (1, 3): [1.0], (2, 3): [1.0]})
        back = vc.herm_from_json(a, X.to_json())
        np.testing.assert_array_equal(back.to_vector(), X.to_vector())

    def test_triangular_json_schema(self):
        a = alg3(1)
        rng = np.random.default_rng(12)
        obj = vc.random_triangular(a, rng).to_json()
        assert set(obj) == {"rank", "diag", "offdiag"}
        assert set(obj["offdiag"]) == {"12", "13", "23"}

    def test_algebra_json_embeds_module(self):
        a = alg3(2)
        obj = a.to_json()
        assert obj["kind"] == "rank3-special"
        assert obj["clifford"]["dim_v"] == 2
        assert obj["spaces"]["23"]["dim"] == 2

    def test_json_rank_mismatch(self):
        with pytest.raises(SpecError):
            vc.herm_from_json(alg2(1), {"rank": 3, "diag": [1, 1, 1]})

    def test_entries_are_immutable(self):
        X = vc.herm_identity(alg3(1))
        with pytest.raises(ValueError):
            X.diag[0] = 5.0
