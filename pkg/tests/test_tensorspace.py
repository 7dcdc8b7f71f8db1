"""Tensor-product coordinate model: bases, gl and symmetric-group actions."""

import random
from fractions import Fraction

import pytest

from xxxbethe.tensorspace import (
    colors_of_decomposition,
    cyclic_vector,
    dim_singular,
    dim_weight,
    express_in_basis_exact,
    full_basis,
    gl_action,
    index_decomposition,
    nullspace_exact,
    permutation_op,
    project_onto,
    singular_basis,
    vec_add,
    vec_is_zero,
    vec_scale,
    vec_sub,
    weight_basis,
    weight_of,
)


def rand_vec(rng, N, n, terms=4):
    basis = full_basis(N, n)
    v = {}
    for _ in range(terms):
        key = basis[rng.randrange(len(basis))]
        v[key] = v.get(key, Fraction(0)) + Fraction(rng.randint(-5, 5))
    return {k: c for k, c in v.items() if c}


def test_full_basis_order_and_size():
    assert full_basis(2, 2) == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert len(full_basis(3, 3)) == 27


def test_weight_basis_pinned():
    assert weight_basis(2, (1, 1)) == [(1, 2), (2, 1)]
    assert weight_basis(2, (2, 1)) == [(1, 1, 2), (1, 2, 1), (2, 1, 1)]


def test_weight_of():
    assert weight_of((1, 2, 1), 3) == (2, 1, 0)
    assert weight_of((3, 3), 3) == (0, 0, 2)


def test_dims_agree_with_bases():
    for N, lam in [(2, (1, 1)), (2, (2, 1)), (2, (2, 2)), (3, (1, 1, 1)), (3, (2, 1, 0))]:
        assert dim_weight(N, lam) == len(weight_basis(N, lam))
        assert dim_singular(N, lam) == len(singular_basis(N, lam))


def test_singular_multiplicities():
    # multiplicity of the irreducible of shape lam inside (C^N)^{tensor n}
    assert dim_singular(2, (2, 1)) == 2
    assert dim_singular(2, (2, 2)) == 2
    assert dim_singular(2, (1, 1)) == 1
    assert dim_singular(3, (1, 1, 1)) == 1
    assert dim_singular(3, (2, 1, 0)) == 2


def test_singular_vectors_killed_by_raising():
    for N, lam in [(2, (2, 1)), (2, (2, 2)), (3, (2, 1, 0))]:
        for v in singular_basis(N, lam):
            for i in range(1, N):
                assert gl_action(i, i + 1, v) == {}


def test_gl_commutator_random():
    # [E_ij, E_kl] = delta_jk E_il - delta_li E_kj
    rng = random.Random(101)
    N, n = 3, 3
    for _ in range(40):
        v = rand_vec(rng, N, n)
        i, j, k, l = (rng.randint(1, N) for _ in range(4))
        lhs = vec_sub(gl_action(i, j, gl_action(k, l, v)), gl_action(k, l, gl_action(i, j, v)))
        rhs = {}
        if j == k:
            rhs = vec_add(rhs, gl_action(i, l, v))
        if l == i:
            rhs = vec_sub(rhs, gl_action(k, j, v))
        assert vec_is_zero(vec_sub(lhs, rhs))


def test_permutations_involution_and_braid():
    rng = random.Random(55)
    N, n = 2, 4
    for _ in range(30):
        v = rand_vec(rng, N, n)
        a, b = rng.sample(range(1, n + 1), 2)
        assert permutation_op(a, b, permutation_op(a, b, v)) == v
        i = rng.randint(1, n - 2)
        lhs = permutation_op(i, i + 1, permutation_op(i + 1, i + 2, permutation_op(i, i + 1, v)))
        rhs = permutation_op(i + 1, i + 2, permutation_op(i, i + 1, permutation_op(i + 1, i + 2, v)))
        assert lhs == rhs


def test_permutations_commute_with_diagonal_gl():
    rng = random.Random(77)
    N, n = 3, 3
    for _ in range(30):
        v = rand_vec(rng, N, n)
        i, j = rng.randint(1, N), rng.randint(1, N)
        a, b = rng.sample(range(1, n + 1), 2)
        x = permutation_op(a, b, gl_action(i, j, v))
        y = gl_action(i, j, permutation_op(a, b, v))
        assert x == y


def test_index_decomposition_roundtrip():
    rng = random.Random(9)
    for _ in range(50):
        N = rng.randint(2, 4)
        n = rng.randint(1, 6)
        colors = tuple(rng.randint(1, N) for _ in range(n))
        d = index_decomposition(colors, N)
        assert len(d) == N
        assert colors_of_decomposition(d, n) == colors
        # blocks are increasing and partition 1..n
        flat = sorted(x for blk in d for x in blk)
        assert flat == list(range(1, n + 1))
        for blk in d:
            assert list(blk) == sorted(blk)


def test_cyclic_vector_weight():
    for N, lam in [(2, (1, 1)), (2, (2, 1)), (3, (1, 1, 1))]:
        v = cyclic_vector(N, lam)
        assert v
        for key in v:
            assert weight_of(key, N) == tuple(lam)


def test_project_onto_exact_and_leakage():
    basis = singular_basis(2, (2, 1))
    target = vec_add(vec_scale(basis[0], Fraction(3)), vec_scale(basis[1], Fraction(-2, 5)))
    coords, resid = project_onto(target, basis, mode="exact")
    assert list(coords) == [Fraction(3), Fraction(-2, 5)]
    assert resid == 0.0
    with pytest.raises(ArithmeticError):
        project_onto({(1, 1, 2): Fraction(1)}, basis, mode="exact")


def test_project_onto_float():
    basis = singular_basis(2, (2, 1))
    target = vec_add(vec_scale(basis[0], 1.25), vec_scale(basis[1], -0.5))
    coords, resid = project_onto(target, basis, mode="float")
    assert abs(coords[0] - 1.25) < 1e-12 and abs(coords[1] + 0.5) < 1e-12
    assert resid < 1e-12


def test_express_in_basis_exact_failure_flag():
    basis = [{(1, 2): Fraction(1)}]
    coords, ok = express_in_basis_exact(basis, {(2, 1): Fraction(1)})
    assert not ok


def test_nullspace_exact_known_kernel():
    # rows of [[1, 1, 0], [0, 1, 1]] kill (1, -1, 1)
    ker = nullspace_exact([[Fraction(1), Fraction(1), Fraction(0)], [Fraction(0), Fraction(1), Fraction(1)]])
    assert len(ker) == 1
    v = ker[0]
    assert v[0] == -v[1] == v[2] != 0
