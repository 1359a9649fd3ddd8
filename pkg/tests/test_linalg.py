import random
from fractions import Fraction as F

import pytest

from isoflag.errors import InputError
from isoflag.linalg import (
    BilinearForm,
    Subspace,
    complete_to_hyperbolic,
    hyperbolic_basis,
    isotropy_classify,
    max_isotropic_dimension,
    meet_join,
    orthocomplement,
    random_special_isometry,
    rank_kernel,
    standard_basis,
)
from isoflag.randgen import random_isotropic_subspace, random_vector
from isoflag.scalars import I, ONE, Scalar, ZERO, sc


def vec(*entries):
    return tuple(x if isinstance(x, Scalar) else sc(x) for x in entries)


class TestScalar:
    def test_arithmetic(self):
        a = Scalar(F(1, 2), F(1, 3))
        b = Scalar(F(-1, 4), 2)
        assert a + b == Scalar(F(1, 4), F(7, 3))
        assert a * b == Scalar(F(1, 2) * F(-1, 4) - F(1, 3) * 2,
                               F(1, 2) * 2 + F(1, 3) * F(-1, 4))
        assert (a / b) * b == a
        assert I * I == Scalar(-1)

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            ONE / ZERO

    def test_sqrt(self):
        assert Scalar(4).sqrt() == Scalar(2)
        assert Scalar(-9).sqrt() == Scalar(0, 3)
        assert Scalar(0, 2).sqrt() == Scalar(1, 1)  # (1+i)^2 = 2i
        assert Scalar(2).sqrt() is None
        assert Scalar(0, 1).sqrt() is None  # sqrt(i) is not in Q(i)
        z = Scalar(F(3, 5), F(-7, 2))
        sq = z * z
        root = sq.sqrt()
        assert root is not None and root * root == sq


class TestRankKernel:
    def test_identity(self):
        rank, kernel = rank_kernel(standard_basis(3))
        assert rank == 3 and kernel.dim == 0

    def test_zero_matrix(self):
        rows = [vec(0, 0, 0, 0), vec(0, 0, 0, 0)]
        rank, kernel = rank_kernel(rows)
        assert rank == 0 and kernel.dim == 4

    def test_gaussian_rank_one(self):
        # rows (1, i), (i, -1): the second is i times the first
        rows = [vec(1, I), vec(I, sc(-1))]
        rank, kernel = rank_kernel(rows)
        assert rank == 1 and kernel.dim == 1
        # kernel vectors annihilate the matrix exactly
        k = kernel.rows[0]
        for r in rows:
            assert (r[0] * k[0] + r[1] * k[1]).is_zero()
        # x + i y = 0, i.e. the line through (1, i) up to scale
        assert kernel.contains(vec(1, I))

    def test_ragged(self):
        with pytest.raises(InputError):
            rank_kernel([vec(1, 0), vec(1, 0, 0)])


class TestMeetJoin:
    def test_idempotent(self):
        u = Subspace.from_vectors([vec(1, 2, 0)], 3)
        meet, join = meet_join(u, u)
        assert meet == u and join == u

    def test_complementary_lines(self):
        u = Subspace.from_vectors([vec(1, 0)], 2)
        v = Subspace.from_vectors([vec(0, 1)], 2)
        meet, join = meet_join(u, v)
        assert meet.dim == 0 and join == Subspace.full(2)

    def test_plane_intersection(self):
        u = Subspace.from_vectors([vec(1, 0, 0, 0), vec(0, 1, 0, 0)], 4)
        v = Subspace.from_vectors([vec(0, 1, 0, 0), vec(0, 0, 1, 0)], 4)
        meet, _ = meet_join(u, v)
        assert meet == Subspace.from_vectors([vec(0, 1, 0, 0)], 4)

    def test_ambient_mismatch(self):
        with pytest.raises(InputError):
            meet_join(Subspace.full(2), Subspace.full(3))

    def test_dimension_formula_random(self):
        rng = random.Random(5)
        for _ in range(60):
            p = rng.randint(2, 6)
            u = Subspace.from_vectors(
                [random_vector(rng, p) for _ in range(rng.randint(0, p))], p)
            v = Subspace.from_vectors(
                [random_vector(rng, p) for _ in range(rng.randint(0, p))], p)
            meet, join = meet_join(u, v)
            assert meet.dim + join.dim == u.dim + v.dim
            assert u.contains_subspace(meet) and v.contains_subspace(meet)
            assert join.contains_subspace(u) and join.contains_subspace(v)


class TestOrthocomplement:
    def test_full_space(self):
        form = BilinearForm(5)
        assert orthocomplement(Subspace.full(5), form).dim == 0

    def test_basis_line(self):
        form = BilinearForm(4)
        y = Subspace.from_vectors([vec(1, 0, 0, 0)], 4)
        perp = orthocomplement(y, form)
        assert perp == Subspace.from_vectors(
            [vec(1, 0, 0, 0), vec(0, 1, 0, 0), vec(0, 0, 1, 0)], 4)

    def test_anisotropic_line(self):
        form = BilinearForm(2)
        y = Subspace.from_vectors([vec(1, 1)], 2)
        assert orthocomplement(y, form) == Subspace.from_vectors([vec(1, -1)], 2)

    def test_double_perp_random(self):
        rng = random.Random(11)
        for _ in range(80):
            p = rng.randint(1, 7)
            form = BilinearForm(p)
            y = Subspace.from_vectors(
                [random_vector(rng, p) for _ in range(rng.randint(0, p))], p)
            perp = orthocomplement(y, form)
            assert y.dim + perp.dim == p
            assert orthocomplement(perp, form) == y


class TestIsotropy:
    def test_isotropic_plane(self):
        form = BilinearForm(4)
        y = Subspace.from_vectors([vec(1, 0, 0, 0), vec(0, 1, 0, 0)], 4)
        iso, radical, rank = isotropy_classify(y, form)
        assert iso and radical == y and rank == 0

    def test_anisotropic_line(self):
        form = BilinearForm(2)
        y = Subspace.from_vectors([vec(1, 1)], 2)
        iso, radical, rank = isotropy_classify(y, form)
        assert not iso and radical.dim == 0 and rank == 1

    def test_zero_subspace(self):
        form = BilinearForm(3)
        iso, radical, rank = isotropy_classify(Subspace.zero(3), form)
        assert iso and rank == 0

    def test_radical_is_isotropic_random(self):
        rng = random.Random(3)
        for _ in range(60):
            p = rng.randint(2, 7)
            form = BilinearForm(p)
            y = Subspace.from_vectors(
                [random_vector(rng, p) for _ in range(rng.randint(1, p))], p)
            _, radical, rank = isotropy_classify(y, form)
            assert rank == y.dim - radical.dim
            iso, _, _ = isotropy_classify(radical, form)
            assert iso


class TestHyperbolicBasis:
    def test_seed_zero_is_standard(self):
        form = BilinearForm(4)
        assert hyperbolic_basis(form, 0) == tuple(standard_basis(4))

    def test_gram_500_seeds(self):
        for seed in range(500):
            p = seed % 8 + 1
            form = BilinearForm(p)
            basis = hyperbolic_basis(form, seed)
            assert form.is_standard_gram(list(basis))

    def test_odd_middle_vector(self):
        form = BilinearForm(3)
        basis = hyperbolic_basis(form, 7)
        assert form.pair(basis[1], basis[1]) == ONE

    def test_seed_two_gram(self):
        form = BilinearForm(2)
        w1, w2 = hyperbolic_basis(form, 1)
        assert form.pair(w1, w1).is_zero()
        assert form.pair(w2, w2).is_zero()
        assert form.pair(w1, w2) == ONE


class TestCompletion:
    def test_random_isotropic_chains(self):
        rng = random.Random(17)
        for trial in range(50):
            q = rng.randint(2, 8)
            form = BilinearForm(q)
            k2 = rng.randint(1, q // 2)
            big = random_isotropic_subspace(q, k2, trial + 1000)
            k1 = rng.randint(0, k2)
            small = Subspace.from_vectors(list(big.rows[:k1]), q)
            chain = [small, big] if small.dim else [big]
            basis = complete_to_hyperbolic(chain, form)
            assert form.is_standard_gram(list(basis))
            assert Subspace.from_vectors(list(basis[:k2]), q) == big
            if small.dim:
                assert Subspace.from_vectors(list(basis[:k1]), q) == small

    def test_rejects_non_isotropic(self):
        form = BilinearForm(2)
        with pytest.raises(InputError):
            complete_to_hyperbolic([Subspace.from_vectors([vec(1, 1)], 2)], form)


class TestIsometries:
    def test_special_isometries_preserve_form(self):
        rng = random.Random(2)
        for seed in range(40):
            p = rng.randint(2, 7)
            form = BilinearForm(p)
            m = random_special_isometry(p, seed + 1)
            for x in standard_basis(p):
                for y in standard_basis(p):
                    from isoflag.linalg import apply_matrix
                    assert form.pair(apply_matrix(x, m), apply_matrix(y, m)) == form.pair(x, y)

    def test_max_isotropic_dimension(self):
        form = BilinearForm(4)
        assert max_isotropic_dimension(Subspace.full(4), form) == 2
        aniso = Subspace.from_vectors([vec(1, 0, 0, 1)], 4)
        assert max_isotropic_dimension(aniso, form) == 0
