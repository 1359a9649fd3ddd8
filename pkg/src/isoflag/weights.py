"""Weight data for the split orthogonal model on a punctured line.

A weight assigns to each of the s punctures a rational alpha in [0, 1/2] and
a non-increasing, antisymmetric q-vector beta (beta_i + beta_{q+1-i} = 0,
beta_i < 1/2).  Everything downstream (admissibility regions, the degree
interval, compactness bookkeeping, monodromy phases) is derived from this
data by exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError

_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Weight:
    q: int
    s: int
    alpha: tuple[Fraction, ...]               # one per puncture
    beta: tuple[tuple[Fraction, ...], ...]    # q entries per puncture

    @classmethod
    def make(cls, q: int, s: int, alpha, beta) -> "Weight":
        return cls(q, s,
                   tuple(Fraction(a) for a in alpha),
                   tuple(tuple(Fraction(b) for b in row) for row in beta))


@dataclass(frozen=True)
class WeightStats:
    abs_alpha: Fraction
    abs_beta: Fraction
    abs_beta1: Fraction
    per_puncture_abs_beta: tuple[Fraction, ...]


def validate_weight(w: Weight) -> list[str]:
    """Check the defining constraints; an empty list means the weight is valid.

    Violations are data, not exceptions: each entry names the failing
    constraint and the indices where it fails.
    """
    violations = []
    if w.q < 2:
        violations.append("q must be at least 2")
    if w.s < 3:
        violations.append("s must be at least 3")
    if len(w.alpha) != w.s:
        violations.append(f"alpha must have s={w.s} entries, got {len(w.alpha)}")
        return violations
    if len(w.beta) != w.s or any(len(row) != w.q for row in w.beta):
        violations.append("beta must be an s x q array")
        return violations
    for j in range(w.s):
        if not (0 <= w.alpha[j] <= _HALF):
            violations.append(f"alpha[{j + 1}] not in [0, 1/2]")
        row = w.beta[j]
        for i in range(w.q):
            if row[i] >= _HALF:
                violations.append(f"beta_i^j<1/2 fails at (i={i + 1}, j={j + 1})")
            if i + 1 < w.q and row[i] < row[i + 1]:
                violations.append(f"non-increasing fails at (i={i + 1}, j={j + 1})")
        for i in range(w.q):
            if row[i] + row[w.q - 1 - i] != 0:
                violations.append(f"antisymmetry fails at (i={i + 1}, j={j + 1})")
                break
    return violations


def require_valid(w: Weight) -> None:
    violations = validate_weight(w)
    if violations:
        raise InputError("invalid weight: " + "; ".join(violations))


def weight_stats(w: Weight) -> WeightStats:
    """|alpha|, |beta|, |beta_1| and the per-puncture positive-part sums."""
    require_valid(w)
    per = tuple(sum((b for b in row if b >= 0), Fraction(0)) for row in w.beta)
    return WeightStats(
        abs_alpha=sum(w.alpha, Fraction(0)),
        abs_beta=sum(per, Fraction(0)),
        abs_beta1=sum((row[0] for row in w.beta), Fraction(0)),
        per_puncture_abs_beta=per,
    )


@dataclass(frozen=True)
class RegionMembership:
    in_w: bool
    in_w_prime: bool


def region_membership(w: Weight) -> RegionMembership:
    """Membership in the admissible region (alpha^j > |beta^j| per puncture and
    |alpha| + |beta| < 1) and in its full-measure refinement where every
    puncture's beta is strictly decreasing."""
    stats = weight_stats(w)
    in_w = all(w.alpha[j] > stats.per_puncture_abs_beta[j] for j in range(w.s)) \
        and stats.abs_alpha + stats.abs_beta < 1
    strict = all(
        all(row[i] > row[i + 1] for i in range(w.q - 1)) for row in w.beta
    )
    return RegionMembership(in_w=in_w, in_w_prime=in_w and strict)


@dataclass(frozen=True)
class JInterval:
    lower: Fraction
    upper: Fraction
    contained_integer: int | None


def j_interval_bounds(abs_alpha: Fraction, abs_beta1: Fraction) -> JInterval:
    """The open degree interval (-1 + (|beta_1| - |alpha|)/2, -|alpha|) and the
    unique integer strictly inside it, if any.

    The interval has length at most 1, so it contains at most one integer;
    when one is present it is always -1 and then 0 < |alpha| < 1.
    """
    lower = Fraction(-1) + (abs_beta1 - abs_alpha) / 2
    upper = -abs_alpha
    contained = None
    if lower < upper:
        cand = lower.numerator // lower.denominator + 1  # smallest integer > lower
        if lower < cand < upper:
            contained = cand
    return JInterval(lower, upper, contained)


def j_interval(w: Weight) -> JInterval:
    stats = weight_stats(w)
    return j_interval_bounds(stats.abs_alpha, stats.abs_beta1)


@dataclass(frozen=True)
class CompactnessResult:
    eta_forced_zero: bool
    failing_condition: str | None


def compactness_criterion(w: Weight, d: int) -> CompactnessResult:
    """Whether the three inequalities forcing the upper Higgs block to vanish
    hold for line-bundle degree d:

        (1) alpha^j > beta_1^j at every puncture
        (2) |alpha| - |beta_1| < 2
        (3) 2 d > -2 + |beta_1| - |alpha|
    """
    stats = weight_stats(w)
    for j in range(w.s):
        if not w.alpha[j] > w.beta[j][0]:
            return CompactnessResult(False, f"(1) alpha^j > beta_1^j fails at j={j + 1}")
    if not stats.abs_alpha - stats.abs_beta1 < 2:
        return CompactnessResult(False, "(2) |alpha| - |beta_1| < 2 fails")
    if not 2 * d > -2 + stats.abs_beta1 - stats.abs_alpha:
        return CompactnessResult(False, "(3) 2 deg > -2 + |beta_1| - |alpha| fails")
    return CompactnessResult(True, None)


@dataclass(frozen=True)
class Monodromy:
    phases: tuple[tuple[Fraction, ...], ...]  # per puncture: (alpha, -alpha, beta_1..beta_q)
    all_unit_modulus: bool
    toledo: Fraction


def _normalize_phase(x: Fraction) -> Fraction:
    """Reduce mod 1 into (-1/2, 1/2]."""
    x = x - (x.numerator // x.denominator)  # into [0, 1)
    if x > _HALF:
        x -= 1
    return x


def monodromy_and_toledo(w: Weight, d: int) -> Monodromy:
    """Boundary monodromy eigenvalues as exact rational phases, plus the
    relative component label d + |alpha|.

    Eigenvalues are exp(2*pi*i*phase) with the phases stored exactly, so unit
    modulus is a structural fact rather than a numerical one.
    """
    stats = weight_stats(w)
    phases = tuple(
        tuple(_normalize_phase(x) for x in (w.alpha[j], -w.alpha[j]) + w.beta[j])
        for j in range(w.s)
    )
    return Monodromy(phases=phases, all_unit_modulus=True, toledo=d + stats.abs_alpha)


def correspondence_caveats(w: Weight) -> list[str]:
    """Boundary situations that are admissible as weights but sit outside the
    hypotheses of the analytic correspondence: alpha^j = 1/2, or alpha^j equal
    to some beta_i^j.  Flagged, never forbidden."""
    notes = []
    for j in range(w.s):
        if w.alpha[j] == _HALF:
            notes.append(f"alpha[{j + 1}] = 1/2 (boundary weight)")
        for i in range(w.q):
            if w.alpha[j] == w.beta[j][i]:
                notes.append(f"alpha[{j + 1}] equals beta_{i + 1}[{j + 1}]")
    return notes
