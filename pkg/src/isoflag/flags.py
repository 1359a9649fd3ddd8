"""Complete isotropic flags and parabolic degrees of subspaces.

A complete isotropic flag of Q(i)^q is stored as an adapted hyperbolic basis
(w_1, ..., w_q) with Gram matrix J_q; the flag pieces are F_i = span(w_1..w_i).
The Gram condition makes F_i isotropic for i <= q/2 and forces the
self-duality F_i^perp = F_{q-i}.

The parabolic degree of a subspace V' relative to a system of s flags and a
weight is the weighted jump count

    pardeg(V') = sum_j sum_i beta_i^j (dim(V' ^ F_i^j) - dim(V' ^ F_{i-1}^j)),

i.e. each new direction of V' entering the flag at position i at puncture j
contributes beta_i^j.  With this convention pardeg vanishes on 0 and on the
full space, |pardeg| <= |beta|, and pardeg(V') = pardeg(V'^perp) for every
subspace (the orthocomplement pairs jump positions i and q+1-i, whose weights
cancel).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError
from .linalg import (
    BilinearForm,
    Subspace,
    Vector,
    hyperbolic_basis,
    invert_matrix,
    kernel_basis,
    mat_mul,
)
from .scalars import ZERO
from .weights import Weight, require_valid, weight_stats


class IsotropicFlag:
    """A complete isotropic flag, held as its adapted hyperbolic basis."""

    __slots__ = ("q", "basis", "_pieces", "_inverse")

    def __init__(self, basis: tuple[Vector, ...]):
        self.q = len(basis)
        for row in basis:
            if len(row) != self.q:
                raise InputError("flag basis must be square")
        self.basis = tuple(basis)
        self._pieces: list[Subspace] | None = None
        self._inverse: list[Vector] | None = None

    @classmethod
    def standard(cls, q: int) -> "IsotropicFlag":
        return cls(hyperbolic_basis(BilinearForm(q), 0))

    def piece(self, i: int) -> Subspace:
        """F_i = span(w_1, ..., w_i); F_0 = 0."""
        if self._pieces is None:
            self._pieces = [Subspace.zero(self.q)]
            for i_ in range(1, self.q + 1):
                self._pieces.append(Subspace.from_vectors(list(self.basis[:i_]), self.q))
        return self._pieces[i]

    def _inv(self) -> list[Vector]:
        if self._inverse is None:
            self._inverse = invert_matrix(list(self.basis))
        return self._inverse

    def profile(self, sub: Subspace) -> tuple[int, ...]:
        """(dim(sub ^ F_i))_{i=0..q}.

        Writing the subspace basis in flag coordinates X, the intersection
        with F_i is cut out by vanishing of the trailing q - i coordinates, so
        dim(sub ^ F_i) = dim(sub) - rank(X[:, i:]).  All the trailing ranks
        come from one right-to-left elimination pass: after eliminating, the
        number of pivots in columns >= i is exactly rank(X[:, i:]).
        """
        if sub.ambient != self.q:
            raise InputError("subspace ambient dimension does not match flag")
        r = sub.dim
        if r == 0:
            return tuple(0 for _ in range(self.q + 1))
        work = [list(row) for row in mat_mul(list(sub.rows), self._inv())]
        pivot_cols: list[int] = []
        used = [False] * r
        for col in range(self.q - 1, -1, -1):
            pivot_row = None
            for k in range(r):
                if not used[k] and not work[k][col].is_zero():
                    pivot_row = k
                    break
            if pivot_row is None:
                continue
            used[pivot_row] = True
            pivot_cols.append(col)
            inv = work[pivot_row][col]
            for k in range(r):
                if k != pivot_row and not work[k][col].is_zero():
                    c = work[k][col] / inv
                    rowk, rowp = work[k], work[pivot_row]
                    for t in range(col + 1):
                        if not rowp[t].is_zero():
                            rowk[t] = rowk[t] - c * rowp[t]
        dims = []
        for i in range(self.q + 1):
            trailing_rank = sum(1 for c in pivot_cols if c >= i)
            dims.append(r - trailing_rank)
        return tuple(dims)

    def intersect_piece(self, sub: Subspace, i: int) -> Subspace:
        """sub ^ F_i, computed in flag coordinates (cheaper than a generic
        meet: one kernel of the trailing coordinate block)."""
        if i <= 0:
            return Subspace.zero(self.q)
        if i >= self.q or sub.dim == 0:
            return sub
        coords = mat_mul(list(sub.rows), self._inv())
        # coefficient vectors c with sum_k c_k (trailing coords of row k) = 0,
        # i.e. the left kernel of the trailing block
        transposed = [tuple(coords[k][col] for k in range(sub.dim))
                      for col in range(i, self.q)]
        combos = kernel_basis(transposed, sub.dim)
        vectors = [
            tuple(sum((c * row[t] for c, row in zip(combo, sub.rows)), ZERO)
                  for t in range(self.q))
            for combo in combos
        ]
        return Subspace.from_vectors(vectors, self.q)

    def vector_jump(self, vectors: list[Vector]) -> int:
        """Smallest i with all given vectors in F_i (vectors assumed nonzero)."""
        coords = mat_mul(vectors, self._inv())
        jump = 0
        for row in coords:
            for i in range(self.q - 1, -1, -1):
                if not row[i].is_zero():
                    jump = max(jump, i + 1)
                    break
        return jump

    def transform(self, m: list[Vector]) -> "IsotropicFlag":
        """The flag with basis w_i @ m (m must be a J-isometry)."""
        return IsotropicFlag(tuple(mat_mul(list(self.basis), m)))


def validate_flag(flag: IsotropicFlag) -> list[str]:
    """A flag is valid iff the Gram matrix of its adapted basis is exactly J_q
    (this already forces F_i^perp = F_{q-i})."""
    form = BilinearForm(flag.q)
    if form.is_standard_gram(list(flag.basis)):
        return []
    return ["adapted basis Gram matrix is not the split form"]


def random_flag(q: int, seed: int) -> IsotropicFlag:
    """A valid flag, deterministic per seed; seed 0 is the standard flag."""
    if q < 2:
        raise InputError("flags need q >= 2")
    return IsotropicFlag(hyperbolic_basis(BilinearForm(q), seed))


@dataclass(frozen=True)
class FlagSystem:
    flags: tuple[IsotropicFlag, ...]

    def __post_init__(self):
        if not self.flags:
            raise InputError("flag system needs at least one flag")
        q = self.flags[0].q
        if any(f.q != q for f in self.flags):
            raise InputError("flags have mismatched dimensions")

    @property
    def q(self) -> int:
        return self.flags[0].q

    @property
    def s(self) -> int:
        return len(self.flags)

    @classmethod
    def standard(cls, q: int, s: int) -> "FlagSystem":
        return cls(tuple(IsotropicFlag.standard(q) for _ in range(s)))

    @classmethod
    def random(cls, q: int, s: int, seed: int) -> "FlagSystem":
        return cls(tuple(random_flag(q, seed * 1000 + j + 1) for j in range(s)))

    def transform(self, m: list[Vector]) -> "FlagSystem":
        return FlagSystem(tuple(f.transform(m) for f in self.flags))


def pardeg_from_profile(profile: tuple[int, ...], beta_row: tuple[Fraction, ...]) -> Fraction:
    """sum_i beta_i (profile[i] - profile[i-1]) for one puncture."""
    total = Fraction(0)
    for i in range(1, len(profile)):
        jump = profile[i] - profile[i - 1]
        if jump:
            total += beta_row[i - 1] * jump
    return total


def pardeg_subspace(sub: Subspace, fs: FlagSystem, w: Weight) -> Fraction:
    """Parabolic degree of a subspace of Q(i)^q relative to s flags and a weight."""
    require_valid(w)
    if w.q != fs.q or w.s != fs.s:
        raise InputError("weight and flag system shapes disagree")
    if sub.ambient != fs.q:
        raise InputError("subspace ambient dimension does not match flags")
    total = Fraction(0)
    for j, flag in enumerate(fs.flags):
        total += pardeg_from_profile(flag.profile(sub), w.beta[j])
    return total


def so2_score(t: Subspace, w: Weight, n_scale: int) -> int:
    """The rank-one factor's contribution N |alpha| (2 dim(T ^ U) - dim T) for
    T among the four subspaces 0, U, U', C^2 cut out by the distinguished
    point of the two-dimensional factor (U = <e_1>).

    Only these four arise as filtration pieces of a one-parameter subgroup of
    the rank-one factor, so anything else is an input error.
    """
    if t.ambient != 2:
        raise InputError("so2_score expects a subspace of C^2")
    stats = weight_stats(w)
    if t.dim in (0, 2):
        return 0  # 2 dim(T ^ U) - dim T vanishes for both
    row = t.rows[0]
    if row[1].is_zero():
        sign = 1        # T = U
    elif row[0].is_zero():
        sign = -1       # T = U'
    else:
        raise InputError("so2_score: line is not a coordinate isotropic line")
    value = n_scale * stats.abs_alpha * sign
    if value.denominator != 1:
        raise InputError("so2_score: N does not clear the weight denominators")
    return value.numerator
