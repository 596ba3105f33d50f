"""Tests for BM products and the predicates built on them."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bmx.errors import ParameterError, ShapeError, SingularFiberError
from bmx.hypermatrix import Hypermatrix3, Matrix, delta, transpose
from bmx.models import SlotPosition
from bmx.orthogonal import random_ortho_hyper
from bmx.products import (
    is_orthogonal,
    is_scaling,
    is_uncorrelated,
    prod2,
    prod2_bg,
    prod3,
    prod3_bg,
    scaling_inverse,
    scaling_pair,
    solve_factor,
    sym_products,
)


def naive_prod3(a, b, c):
    m, ell, p = a.shape
    n = b.shape[1]
    out = np.zeros((m, n, p), dtype=complex)
    for i, j, k in np.ndindex(m, n, p):
        out[i, j, k] = sum(a[i, t, k] * b[i, j, t] * c[t, j, k] for t in range(ell))
    return out


def naive_prod3_bg(a, b, c, bg):
    m, ell, p = a.shape
    n = b.shape[1]
    out = np.zeros((m, n, p), dtype=complex)
    for i, j, k in np.ndindex(m, n, p):
        for t0, t1, t2 in np.ndindex(ell, ell, ell):
            out[i, j, k] += a[i, t0, k] * b[i, j, t1] * c[t2, j, k] * bg[t0, t1, t2]
    return out


@st.composite
def conformable_triples(draw):
    m, ell, n, p = (draw(st.integers(1, 4)) for _ in range(4))
    entries = st.integers(-5, 5)
    a = draw(arrays(np.int64, (m, ell, p), elements=entries))
    b = draw(arrays(np.int64, (m, n, ell), elements=entries))
    c = draw(arrays(np.int64, (ell, n, p), elements=entries))
    bg = draw(arrays(np.int64, (ell, ell, ell), elements=entries))
    return a, b, c, bg


class TestMatrixProducts:
    def test_identity(self):
        m = Matrix([[1, 2], [3, 4]])
        assert prod2(Matrix.identity(2), m) == m

    def test_inner_dimension(self):
        with pytest.raises(ShapeError, match="Inner dimension"):
            prod2(Matrix(np.ones((2, 3))), Matrix(np.ones((2, 2))))

    def test_background_identity(self, rng):
        a, b = Matrix(rng.standard_normal((3, 3))), Matrix(rng.standard_normal((3, 3)))
        assert prod2_bg(a, b, Matrix.identity(3)).allclose(prod2(a, b), 1e-12)

    def test_background_unit(self, rng):
        a, b = Matrix(rng.standard_normal((3, 3))), Matrix(rng.standard_normal((3, 3)))
        unit = np.zeros((3, 3))
        unit[1, 1] = 1
        product = prod2_bg(a, b, Matrix(unit))
        expected = np.outer(a.array[:, 1], b.array[1, :])
        assert np.allclose(product.array, expected, atol=1e-12)


class TestProd3:
    def test_delta(self):
        assert prod3(delta(2), delta(2), delta(2)) == delta(2)

    @settings(max_examples=200, deadline=None)
    @given(conformable_triples())
    def test_matches_loops(self, triple):
        a, b, c, bg = triple
        ha, hb, hc = Hypermatrix3(a), Hypermatrix3(b), Hypermatrix3(c)
        assert np.array_equal(prod3(ha, hb, hc).array, naive_prod3(a, b, c))
        assert np.array_equal(
            prod3_bg(ha, hb, hc, Hypermatrix3(bg)).array, naive_prod3_bg(a, b, c, bg)
        )

    def test_non_conformable_names_the_dimension(self):
        with pytest.raises(ShapeError, match="Depth of B vs columns of A") as exc:
            prod3(
                Hypermatrix3.zeros((2, 3, 2)),
                Hypermatrix3.zeros((2, 2, 2)),
                Hypermatrix3.zeros((3, 2, 2)),
            )
        assert exc.value.axis == 2

    def test_transpose_reverses_order(self, random_complex):
        for _ in range(20):
            a, b, c = (random_complex((3, 3, 3)) for _ in range(3))
            lhs = transpose(prod3(a, b, c))
            rhs = prod3(transpose(b), transpose(c), transpose(a))
            assert lhs.allclose(rhs, 1e-12)

    def test_vector_triple_gives_sum_of_cubes(self):
        x = np.array([1.0, -2.0, 3.0])
        h = Hypermatrix3(x.reshape(-1, 1, 1))
        value = prod3(transpose(h, 2), transpose(h), h)
        assert value.shape == (1, 1, 1)
        assert value[0, 0, 0] == pytest.approx(np.sum(x**3))


class TestBackgroundProduct:
    def test_delta_background(self, random_complex):
        a, b, c = (random_complex((2, 2, 2)) for _ in range(3))
        assert prod3_bg(a, b, c, delta(2)).allclose(prod3(a, b, c), 1e-12)

    def test_zero_background(self, random_complex):
        a, b, c = (random_complex((2, 2, 2)) for _ in range(3))
        zero = Hypermatrix3.zeros((2, 2, 2))
        assert prod3_bg(a, b, c, zero) == zero

    def test_background_side(self, random_complex):
        a, b, c = (random_complex((2, 2, 2)) for _ in range(3))
        with pytest.raises(ShapeError, match="cubic of side 2"):
            prod3_bg(a, b, c, delta(3))


class TestSymmetricProducts:
    def test_delta(self):
        assert sym_products(delta(2)) == (delta(2), delta(2), delta(2))

    def test_products_are_symmetric(self, rng):
        a = Hypermatrix3(rng.integers(-4, 5, (3, 3, 3)))
        for s in sym_products(a):
            assert s == transpose(s)

    def test_corner_is_sum_of_cubes(self, random_complex):
        a = random_complex((2, 2, 2))
        first, _, _ = sym_products(a)
        expected = a[0, 0, 0] ** 3 + a[0, 1, 0] ** 3
        assert first[0, 0, 0] == pytest.approx(expected)

    def test_non_cubic(self):
        with pytest.raises(ShapeError, match="cubic"):
            sym_products(Hypermatrix3.zeros((2, 2, 3)))


class TestPredicates:
    def test_delta_is_orthogonal(self):
        result = is_orthogonal(delta(2))
        assert result.passed
        assert result.residual == 0

    def test_random_is_not_orthogonal(self, random_complex):
        result = is_orthogonal(random_complex((2, 2, 2)))
        assert not result
        assert result.residual > 1e-3

    def test_generated_is_orthogonal(self, rng):
        for _ in range(50):
            assert is_orthogonal(random_ortho_hyper(rng), 1e-9)

    def test_uncorrelated_triple_from_orthogonal(self, rng):
        x = random_ortho_hyper(rng)
        assert is_uncorrelated(x, transpose(x, 2), transpose(x), 1e-9)

    def test_delta_is_scaling_every_way(self):
        result = is_scaling(delta(2))
        assert result.passed
        assert len(result.matched) == 3

    def test_random_is_not_scaling(self, random_complex):
        result = is_scaling(random_complex((2, 2, 2)))
        assert not result.passed
        assert result.matched == ()


class TestScalingPair:
    def test_apply_scales_entries(self, rng, random_complex):
        alpha = Matrix(rng.uniform(1, 2, (2, 2)))
        beta = Matrix(rng.uniform(1, 2, (2, 2)))
        x = random_complex((2, 2, 2))
        scaled = scaling_pair(alpha, beta).apply(x)
        for i, j, k in np.ndindex(2, 2, 2):
            expected = alpha[i, k] * beta[k, j] * x[i, j, k]
            assert scaled[i, j, k] == pytest.approx(expected)

    def test_inverse_undoes(self, rng, random_complex):
        pair = scaling_pair(
            Matrix(rng.uniform(1, 2, (2, 2))), Matrix(rng.uniform(1, 2, (2, 2)))
        )
        x = random_complex((2, 2, 2))
        assert scaling_inverse(pair).apply(pair.apply(x)).allclose(x, 1e-12)

    def test_inverse_needs_nonzero_entries(self):
        pair = scaling_pair(Matrix([[1, 0], [1, 1]]), Matrix([[1, 1], [1, 1]]))
        with pytest.raises(ParameterError, match="zero entry in alpha"):
            scaling_inverse(pair)


class TestSolveFactor:
    @pytest.mark.parametrize("position", list(SlotPosition))
    def test_recovers_unknown_factor(self, position, random_complex):
        factors = [random_complex((2, 2, 2)) for _ in range(3)]
        target = prod3(*factors)
        slot = list(SlotPosition).index(position)
        known = [f for i, f in enumerate(factors) if i != slot]
        solved = solve_factor(position, known[0], known[1], target)
        assert solved.allclose(factors[slot], 1e-8)

    def test_singular_fiber(self):
        zero = Hypermatrix3.zeros((2, 2, 2))
        with pytest.raises(SingularFiberError, match="Fiber") as exc:
            solve_factor("first", zero, zero, zero)
        assert exc.value.fiber == (0, 0)
