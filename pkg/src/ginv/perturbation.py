"""Perturbation analysis for inverses with prescribed range and kernel.

Everything here asks one of three questions about a base matrix a, its
inverse b with prescribed idempotents (p, q), and a perturbation:

* update: when a moves to a + delta_a, does the one-solve update
  b (1 + delta_a b)^{-1} produce the perturbed inverse, and which algebraic
  or geometric conditions characterize that;
* stability: does the perturbed matrix keep its column space clear of
  col(q), and which gap conditions are sufficient for that;
* quantitative bounds: when the idempotents move to p', q' (and possibly a
  moves too), certified upper bounds for the relative change of the inverse
  and for the norm of the new inverse, each under an explicit smallness
  hypothesis on the perturbation.

Equivalence suites return an EquivalenceReport whose conditions must all
agree; one-directional results return an ImplicationReport; quantitative
results return a BoundReport with the hypothesis flag, both sides of the
inequality, and the margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimMismatch, InputError, NotExists, RepresentationMismatch, SideConditionViolated
from .gen_inverse import (
    GInvResult,
    build_witness,
    classify_strict,
    compute_l,
    compute_outer_pql,
    exists_outer_pql,
    group_inverse,
    one_five_inverse,
)
from .idempotents import Idempotent, idempotent_from_matrix
from .linalg import DEFAULT_TOL, Tolerances, as_matrix, spectral_norm, try_inverse
from .subspaces import (
    gap,
    intersection_trivial,
    kernel_of,
    map_subspace,
    range_of,
    subspaces_equal,
)

__all__ = [
    "Scenario",
    "EquivalenceReport",
    "ImplicationItem",
    "ImplicationReport",
    "BoundReport",
    "kappa",
    "is_stable",
    "update_formula",
    "equivalence_thm24",
    "lemma26_f",
    "equivalence_thm27",
    "equivalence_cor28",
    "equivalence_thm_tm27",
    "gap_sufficient_lemma210",
    "cor_lemas1",
    "equivalence_thm212",
    "bound_thm34",
    "bound_thm36",
    "bound_thm38",
    "bound_thm39",
    "cor_12_variants",
]

NAN = float("nan")


@dataclass(frozen=True)
class Scenario:
    """One perturbation instance: a, its shift, and the prescribed idempotents."""

    a: np.ndarray
    delta_a: np.ndarray
    p: Idempotent
    q: Idempotent
    p_prime: Optional[Idempotent] = None
    q_prime: Optional[Idempotent] = None
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        a = as_matrix(self.a)
        d = as_matrix(self.delta_a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "delta_a", d)
        if a.shape[0] != a.shape[1]:
            raise DimMismatch("a must be square")
        if d.shape != a.shape:
            raise DimMismatch("delta_a must have the same shape as a")
        for name in ("p", "q", "p_prime", "q_prime"):
            val = getattr(self, name)
            if val is None:
                continue
            if not isinstance(val, Idempotent):
                val = idempotent_from_matrix(val, self.tol)
                object.__setattr__(self, name, val)
            if val.n != a.shape[0]:
                raise DimMismatch(f"{name} does not match the size of a")

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def a_bar(self) -> np.ndarray:
        return self.a + self.delta_a


@dataclass(frozen=True)
class EquivalenceReport:
    """Conditions that a theorem declares equivalent, with the verdicts.

    conditions is an ordered tuple of (name, truth, residual); consistent
    means the truths all agree and any attached identity held numerically.
    aux carries extra diagnostics (deviations, margins).
    """

    conditions: tuple
    consistent: bool
    aux: dict = field(default_factory=dict)

    def booleans(self):
        return [c[1] for c in self.conditions]


@dataclass(frozen=True)
class ImplicationItem:
    name: str
    hypothesis: bool
    conclusion: bool
    data: dict

    @property
    def violated(self) -> bool:
        return self.hypothesis and not self.conclusion


@dataclass(frozen=True)
class ImplicationReport:
    """One-directional results: each item must not have hyp true, concl false."""

    items: tuple
    ok: bool


@dataclass(frozen=True)
class BoundReport:
    """A quantitative bound instance.

    When the hypothesis fails, lhs/rhs/margin are NaN and holds is vacuously
    true. When it is satisfied, holds requires the asserted existence and
    every inequality of the statement (relative error; norm bound in aux).
    """

    theorem: str
    n: int
    kappa: float
    hypothesis_satisfied: bool
    lhs: float
    rhs: float
    margin: float
    holds: bool
    aux: dict = field(default_factory=dict)


def kappa(a, b) -> float:
    """Condition measure of the pair: product of the spectral norms."""
    if isinstance(b, GInvResult):
        b = b.b
    return spectral_norm(as_matrix(a)) * spectral_norm(as_matrix(b))


def _res_scale(a_bar_norm: float, b_norm: float, tol: Tolerances) -> float:
    # Residual-to-boolean conversion scale for algebraic identities.
    return tol.tol_eq * (1.0 + a_bar_norm) * (1.0 + b_norm) ** 2


def _defect(m, n_sub, tol: Tolerances) -> float:
    """How many dimensions two subspaces share (0.0 means trivial meet)."""
    if m.dim == 0 or n_sub.dim == 0:
        return 0.0
    from .linalg import rank as _rank

    stacked = np.hstack([m.basis, n_sub.basis])
    return float(m.dim + n_sub.dim - _rank(stacked, tol, scale=1.0))


def is_stable(scenario: Scenario) -> bool:
    """Does col(a + delta_a) still meet col(q) only at zero?"""
    s = scenario
    a_bar = s.a_bar
    scale = max(spectral_norm(a_bar), 1.0)
    return intersection_trivial(range_of(a_bar, s.tol, scale=scale), s.q.range, s.tol)


def update_formula(b, delta_a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """The perturbed inverse by one solve: b (1 + delta_a b)^{-1}.

    Also evaluates the mirrored form (1 + b delta_a)^{-1} b and insists the
    two agree; they are equal whenever either factor is invertible. Raises
    NotExists when the update factor is singular, which is exactly the case
    where the perturbed inverse fails to exist.
    """
    b = as_matrix(b)
    d = as_matrix(delta_a)
    if b.shape != d.shape or b.shape[0] != b.shape[1]:
        raise DimMismatch("b and delta_a must be square of the same size")
    n = b.shape[0]
    eye = np.eye(n, dtype=complex)
    inv_right = try_inverse(eye + d @ b, tol)
    if inv_right is None:
        raise NotExists("1 + delta_a b is singular; the perturbed inverse does not exist")
    form1 = b @ inv_right
    inv_left = try_inverse(eye + b @ d, tol)
    if inv_left is None:
        raise NotExists("1 + b delta_a is singular; the perturbed inverse does not exist")
    form2 = inv_left @ b
    dev = spectral_norm(form1 - form2)
    lim = 10.0 * tol.tol_eq * (1.0 + spectral_norm(form1)) * (1.0 + spectral_norm(b)) * (
        1.0 + spectral_norm(d)
    )
    if dev > lim:
        raise RepresentationMismatch(f"the two update forms disagree by {dev:.3e}")
    return form1


def _invertible(m, tol: Tolerances):
    """(bool, margin): is m invertible, with its relative smallest singular value."""
    sv = np.linalg.svd(m, compute_uv=False)
    top = float(sv[0]) if sv.size else 0.0
    bottom = float(sv[-1]) if sv.size else 0.0
    if top == 0.0:
        return False, 0.0
    return bottom > tol.tol_inv * top, bottom


def equivalence_thm24(scenario: Scenario) -> EquivalenceReport:
    """Invertibility of either update factor versus existence after the shift.

    Three conditions that must agree: 1 + delta_a b invertible, 1 + b delta_a
    invertible, and the perturbed inverse existing for (p, q). When all hold,
    the update formula must match the directly computed perturbed inverse;
    the deviation is the third condition's residual.
    """
    s = scenario
    base = compute_outer_pql(s.a, s.p, s.q, s.tol)
    b = base.b
    n = s.n
    eye = np.eye(n, dtype=complex)
    ok_right, m_right = _invertible(eye + s.delta_a @ b, s.tol)
    ok_left, m_left = _invertible(eye + b @ s.delta_a, s.tol)
    report = exists_outer_pql(s.a_bar, s.p, s.q, s.tol)
    aux = {"sigma_min_core": float(report.sigma_min_core)}
    dev = NAN
    identity_ok = True
    if ok_right and ok_left and report.exists:
        updated = update_formula(b, s.delta_a, s.tol)
        direct = compute_outer_pql(s.a_bar, s.p, s.q, s.tol)
        dev = spectral_norm(updated - direct.b)
        identity_ok = dev <= _res_scale(spectral_norm(s.a_bar), spectral_norm(direct.b), s.tol)
        aux["update_vs_direct"] = dev
    conditions = (
        ("one_plus_delta_b_invertible", ok_right, m_right),
        ("one_plus_b_delta_invertible", ok_left, m_left),
        ("perturbed_exists", report.exists, dev),
    )
    flags = [c[1] for c in conditions]
    consistent = all(flags) == any(flags) and identity_ok
    return EquivalenceReport(conditions, consistent, aux)


def lemma26_f(scenario: Scenario):
    """The idempotent f = (1 + b delta_a)^{-1} (1 - b a) and what it certifies.

    f is always idempotent and always contains null(a + delta_a) in its
    column space; the equality col(f) = null(a + delta_a) holds exactly when
    the perturbation is stable. Returns (f, report) where the report's two
    conditions are that equality and stability; consistency additionally
    requires the two unconditional facts.
    """
    s = scenario
    base = compute_outer_pql(s.a, s.p, s.q, s.tol)
    b = base.b
    n = s.n
    eye = np.eye(n, dtype=complex)
    inv_left = try_inverse(eye + b @ s.delta_a, s.tol)
    if inv_left is None:
        raise NotExists("1 + b delta_a is singular")
    f = inv_left @ (eye - b @ s.a)
    a_bar = s.a_bar
    nf = spectral_norm(f)
    idem_resid = spectral_norm(f @ f - f)
    idem_ok = idem_resid <= s.tol.tol_eq * (1.0 + nf * nf)
    # The rank of f can drop to 0 and the matrix is built from cancellation,
    # so anchor its rank cutoff at 1 rather than at its own largest singular
    # value.
    col_f = range_of(f, s.tol, scale=max(nf, 1.0))
    ker_bar = kernel_of(a_bar, s.tol, scale=max(spectral_norm(a_bar), 1.0))
    subset_gap = gap(ker_bar, col_f).delta_mn
    subset_ok = subset_gap <= 10 * s.tol.tol_eq
    equal = subspaces_equal(ker_bar, col_f, s.tol)
    stable = is_stable(s)
    conditions = (
        ("kernel_of_perturbed_equals_range_f", equal, gap(ker_bar, col_f).gap),
        ("stable", stable, _defect(range_of(a_bar, s.tol, scale=max(spectral_norm(a_bar), 1.0)), s.q.range, s.tol)),
    )
    consistent = (equal == stable) and idem_ok and subset_ok
    aux = {"f_idempotent_residual": idem_resid, "kernel_subset_gap": subset_gap}
    return f, EquivalenceReport(conditions, consistent, aux)


def equivalence_thm27(scenario: Scenario) -> EquivalenceReport:
    """Stability versus the update being a full inner-outer inverse.

    Four equivalent conditions, all evaluated: the updated matrix solves all
    the inner-outer equations for a + delta_a; stability; and the two
    one-sided annihilation identities. Requires 1 + b delta_a invertible.
    """
    s = scenario
    base = compute_outer_pql(s.a, s.p, s.q, s.tol)
    b = base.b
    n = s.n
    eye = np.eye(n, dtype=complex)
    a_bar = s.a_bar
    w = update_formula(b, s.delta_a, s.tol)
    w_class = classify_strict(a_bar, s.p, s.q, w, s.tol)
    cond1 = w_class.flags["outer_pql"] and w_class.flags["l_inverse"]
    resid1 = max(
        w_class.residuals["bab_b"],
        w_class.residuals["aba_a"],
        w_class.residuals["gap_range"],
        w_class.residuals["gap_kernel"],
    )
    stable = is_stable(s)
    na_bar = spectral_norm(a_bar)
    scale = _res_scale(na_bar, spectral_norm(b), s.tol)
    inv_left = try_inverse(eye + b @ s.delta_a, s.tol)
    inv_right = try_inverse(eye + s.delta_a @ b, s.tol)
    if inv_left is None or inv_right is None:
        raise NotExists("1 + b delta_a is singular")
    resid3 = spectral_norm(a_bar @ inv_left @ (eye - b @ s.a))
    resid4 = spectral_norm((eye - s.a @ b) @ inv_right @ a_bar)
    stable_defect = _defect(
        range_of(a_bar, s.tol, scale=max(na_bar, 1.0)), s.q.range, s.tol
    )
    conditions = (
        ("update_is_inner_outer_for_perturbed", cond1, resid1),
        ("stable", stable, stable_defect),
        ("a_bar_annihilates_left_factor", resid3 <= scale, resid3),
        ("a_bar_annihilated_right_factor", resid4 <= scale, resid4),
    )
    flags = [c[1] for c in conditions]
    return EquivalenceReport(conditions, all(flags) == any(flags))


def equivalence_cor28(scenario: Scenario) -> EquivalenceReport:
    """Stability versus the two mapped-subspace identities of the update factors."""
    s = scenario
    base = compute_outer_pql(s.a, s.p, s.q, s.tol)
    b = base.b
    n = s.n
    eye = np.eye(n, dtype=complex)
    a_bar = s.a_bar
    inv_left = try_inverse(eye + b @ s.delta_a, s.tol)
    inv_right = try_inverse(eye + s.delta_a @ b, s.tol)
    if inv_left is None or inv_right is None:
        raise NotExists("update factor is singular")
    na_bar = max(spectral_norm(a_bar), 1.0)
    stable = is_stable(s)
    ba = b @ s.a
    ab = s.a @ b
    ker_ba = kernel_of(ba, s.tol, scale=max(spectral_norm(ba), 1.0))
    ker_bar = kernel_of(a_bar, s.tol, scale=na_bar)
    mapped_kernel = map_subspace(inv_left, ker_ba, s.tol)
    cond2 = subspaces_equal(mapped_kernel, ker_bar, s.tol)
    col_bar = range_of(a_bar, s.tol, scale=na_bar)
    col_ab = range_of(ab, s.tol, scale=max(spectral_norm(ab), 1.0))
    mapped_range = map_subspace(inv_right, col_bar, s.tol)
    cond3 = subspaces_equal(mapped_range, col_ab, s.tol)
    conditions = (
        ("stable", stable, _defect(col_bar, s.q.range, s.tol)),
        ("mapped_kernel_matches", cond2, gap(mapped_kernel, ker_bar).gap),
        ("mapped_range_matches", cond3, gap(mapped_range, col_ab).gap),
    )
    flags = [c[1] for c in conditions]
    return EquivalenceReport(conditions, all(flags) == any(flags))


def equivalence_thm_tm27(scenario: Scenario) -> EquivalenceReport:
    """Update-formula validity versus the three-part geometric condition.

    Composite condition one: 1 + b delta_a invertible, col(a + delta_a)
    equals the kernel of q, and the update equals the directly computed
    perturbed inner-outer inverse. Composite condition two: both trivial
    intersections plus (a + delta_a) col(p) = kernel of q. No standing
    invertibility assumption: a singular update factor just makes the first
    condition false.
    """
    s = scenario
    base = compute_l(s.a, s.p, s.q, s.tol)
    b = base.b
    n = s.n
    eye = np.eye(n, dtype=complex)
    a_bar = s.a_bar
    na_bar = max(spectral_norm(a_bar), 1.0)
    aux = {}

    ok_left, margin_left = _invertible(eye + b @ s.delta_a, s.tol)
    col_bar = range_of(a_bar, s.tol, scale=na_bar)
    range_matches = subspaces_equal(col_bar, s.q.kernel, s.tol)
    formula_ok = False
    dev = NAN
    if ok_left:
        updated = update_formula(b, s.delta_a, s.tol)
        try:
            direct = compute_l(a_bar, s.p, s.q, s.tol)
            dev = spectral_norm(updated - direct.b)
            formula_ok = dev <= _res_scale(spectral_norm(a_bar), spectral_norm(direct.b), s.tol)
        except NotExists:
            formula_ok = False
    cond1 = ok_left and range_matches and formula_ok
    aux["update_factor_margin"] = margin_left
    aux["range_vs_kernel_q_gap"] = gap(col_bar, s.q.kernel).gap
    aux["update_vs_direct"] = dev

    ker_bar = kernel_of(a_bar, s.tol, scale=na_bar)
    stable = intersection_trivial(col_bar, s.q.range, s.tol)
    trivial_p = intersection_trivial(ker_bar, s.p.range, s.tol)
    image = map_subspace(a_bar, s.p.range, s.tol)
    image_matches = subspaces_equal(image, s.q.kernel, s.tol)
    cond2 = stable and trivial_p and image_matches
    aux["image_vs_kernel_q_gap"] = gap(image, s.q.kernel).gap

    conditions = (
        ("update_valid_and_range_matches", cond1, gap(col_bar, s.q.kernel).gap),
        ("stable_trivial_and_image_matches", cond2, gap(image, s.q.kernel).gap),
    )
    return EquivalenceReport(conditions, cond1 == cond2, aux)


def gap_sufficient_lemma210(scenario: Scenario) -> ImplicationReport:
    """One-sided gap conditions that force the trivial intersections.

    Item one: a small gap from col(a + delta_a) to col(a) (below the inverse
    norm of 1 - a b) forces col(a + delta_a) to meet col(q) trivially. Item
    two: the kernel analogue with threshold 1 / ||b a||. Hypothesis-true,
    conclusion-false instances must never occur.
    """
    s = scenario
    base = compute_l(s.a, s.p, s.q, s.tol)
    b = base.b
    n = s.n
    eye = np.eye(n, dtype=complex)
    a_bar = s.a_bar
    na = max(spectral_norm(s.a), 1.0)
    na_bar = max(spectral_norm(a_bar), 1.0)

    col_bar = range_of(a_bar, s.tol, scale=na_bar)
    col_a = range_of(s.a, s.tol, scale=na)
    norm_one_ab = spectral_norm(eye - s.a @ b)
    thr_range = math.inf if norm_one_ab == 0 else 1.0 / norm_one_ab
    delta_range = gap(col_bar, col_a).delta_mn
    concl_range = intersection_trivial(col_bar, s.q.range, s.tol)

    ker_bar = kernel_of(a_bar, s.tol, scale=na_bar)
    ker_a = kernel_of(s.a, s.tol, scale=na)
    norm_ba = spectral_norm(b @ s.a)
    thr_kernel = math.inf if norm_ba == 0 else 1.0 / norm_ba
    delta_kernel = gap(ker_bar, ker_a).delta_mn
    concl_kernel = intersection_trivial(ker_bar, s.p.range, s.tol)

    items = (
        ImplicationItem(
            "range_gap_forces_stability",
            delta_range < thr_range - s.tol.tol_eq,
            concl_range,
            {"delta": delta_range, "threshold": thr_range},
        ),
        ImplicationItem(
            "kernel_gap_forces_trivial_meet",
            delta_kernel < thr_kernel - s.tol.tol_eq,
            concl_kernel,
            {"delta": delta_kernel, "threshold": thr_kernel},
        ),
    )
    return ImplicationReport(items, not any(it.violated for it in items))


def cor_lemas1(scenario: Scenario) -> ImplicationReport:
    """Two sufficient conditions for the update formula to be the new inverse.

    Route one: both gap hypotheses plus (a + delta_a) col(p) equal to the
    kernel of q. Route two: 1 + b delta_a invertible plus the range-gap
    hypothesis. Either route must imply that the perturbed inner-outer
    inverse exists and equals b (1 + delta_a b)^{-1}.
    """
    s = scenario
    base = compute_l(s.a, s.p, s.q, s.tol)
    b = base.b
    n = s.n
    eye = np.eye(n, dtype=complex)
    a_bar = s.a_bar
    na = max(spectral_norm(s.a), 1.0)
    na_bar = max(spectral_norm(a_bar), 1.0)

    col_bar = range_of(a_bar, s.tol, scale=na_bar)
    col_a = range_of(s.a, s.tol, scale=na)
    ker_bar = kernel_of(a_bar, s.tol, scale=na_bar)
    ker_a = kernel_of(s.a, s.tol, scale=na)
    norm_one_ab = spectral_norm(eye - s.a @ b)
    norm_ba = spectral_norm(b @ s.a)
    thr_range = math.inf if norm_one_ab == 0 else 1.0 / norm_one_ab
    thr_kernel = math.inf if norm_ba == 0 else 1.0 / norm_ba
    hyp_range = gap(col_bar, col_a).delta_mn < thr_range - s.tol.tol_eq
    hyp_kernel = gap(ker_bar, ker_a).delta_mn < thr_kernel - s.tol.tol_eq
    image = map_subspace(a_bar, s.p.range, s.tol)
    image_matches = subspaces_equal(image, s.q.kernel, s.tol)
    ok_left, _ = _invertible(eye + b @ s.delta_a, s.tol)

    hyp_i = hyp_range and hyp_kernel and image_matches
    hyp_ii = ok_left and hyp_range

    conclusion = False
    dev = NAN
    if hyp_i or hyp_ii:
        try:
            updated = update_formula(b, s.delta_a, s.tol)
            direct = compute_l(a_bar, s.p, s.q, s.tol)
            dev = spectral_norm(updated - direct.b)
            conclusion = dev <= _res_scale(spectral_norm(a_bar), spectral_norm(direct.b), s.tol)
        except NotExists:
            conclusion = False
    data = {"update_vs_direct": dev}
    items = (
        ImplicationItem("gaps_and_image_route", hyp_i, conclusion if hyp_i else True, data),
        ImplicationItem("invertibility_route", hyp_ii, conclusion if hyp_ii else True, data),
    )
    return ImplicationReport(items, not any(it.violated for it in items))


def equivalence_thm212(scenario: Scenario) -> EquivalenceReport:
    """Strict-inverse perturbation: formula validity versus the swap identity.

    For a strict base inverse (b a = p, 1 - a b = q exactly), three
    equivalent conditions: the update formula produces the strict perturbed
    inverse; (a + delta_a) p = (1 - q)(a + delta_a); and the two one-sided
    product identities. Requires 1 + b delta_a invertible.
    """
    s = scenario
    base = compute_outer_pql(s.a, s.p, s.q, s.tol)
    if not base.flags["strict_pq"]:
        raise NotExists(
            "the base inverse is not strict for (p, q): "
            f"||ba - p|| = {base.residuals['ba_p']:.3e}, ||1-ab-q|| = {base.residuals['one_ab_q']:.3e}"
        )
    b = base.b
    n = s.n
    eye = np.eye(n, dtype=complex)
    a_bar = s.a_bar
    inv_left = try_inverse(eye + b @ s.delta_a, s.tol)
    if inv_left is None:
        raise NotExists("1 + b delta_a is singular")
    na_bar = spectral_norm(a_bar)
    scale = _res_scale(na_bar, spectral_norm(b), s.tol)

    w = update_formula(b, s.delta_a, s.tol)
    w_class = classify_strict(a_bar, s.p, s.q, w, s.tol)
    cond1 = w_class.flags["outer_pql"] and w_class.flags["strict_pq"]
    resid1 = max(
        w_class.residuals["bab_b"],
        w_class.residuals["ba_p"],
        w_class.residuals["one_ab_q"],
    )

    one_minus_q = eye - s.q.m
    resid2 = spectral_norm(a_bar @ s.p.m - one_minus_q @ a_bar)
    cond2 = resid2 <= scale

    resid3a = spectral_norm(a_bar @ b - one_minus_q @ a_bar @ b)
    resid3b = spectral_norm(b @ a_bar - b @ a_bar @ s.p.m)
    cond3 = resid3a <= scale and resid3b <= scale

    conditions = (
        ("update_is_strict_inverse_of_perturbed", cond1, resid1),
        ("swap_identity", cond2, resid2),
        ("one_sided_product_identities", cond3, max(resid3a, resid3b)),
    )
    flags = [c[1] for c in conditions]
    return EquivalenceReport(conditions, all(flags) == any(flags))


def _vacuous(theorem: str, n: int, kap: float, aux: dict) -> BoundReport:
    return BoundReport(theorem, n, kap, False, NAN, NAN, NAN, True, aux)


def _relative_lhs(b_new: np.ndarray, b_old: np.ndarray) -> float:
    diff = spectral_norm(b_new - b_old)
    base = spectral_norm(b_old)
    if base == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return diff / base


def bound_thm34(a, p, q, p_prime, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Moving the range idempotent: certified relative-change bound.

    Hypothesis ||p - p'|| < 1/(1+kappa)^2. Then the inverse for (p', q)
    exists, its relative distance from b is at most
    (1+kappa) d / (1 - (1+kappa) d), and its norm is at most
    ||b|| / (1 - (1+kappa) d).
    """
    a = as_matrix(a)
    tol = tol or DEFAULT_TOL
    base = compute_outer_pql(a, p, q, tol)
    b = base.b
    kap = kappa(a, b)
    p = p if isinstance(p, Idempotent) else idempotent_from_matrix(p, tol)
    p_prime = p_prime if isinstance(p_prime, Idempotent) else idempotent_from_matrix(p_prime, tol)
    dp = spectral_norm(p_prime.m - p.m)
    threshold = 1.0 / (1.0 + kap) ** 2
    n = a.shape[0]
    aux = {"dp": dp, "threshold_dp": threshold}
    if not dp < threshold - tol.tol_eq:
        return _vacuous("thm3.4", n, kap, aux)
    denom = 1.0 - (1.0 + kap) * dp
    rhs = (1.0 + kap) * dp / denom
    try:
        new = compute_outer_pql(a, p_prime, q, tol)
    except NotExists:
        aux["exists"] = 0.0
        return BoundReport("thm3.4", n, kap, True, math.inf, rhs, -math.inf, False, aux)
    aux["exists"] = 1.0
    lhs = _relative_lhs(new.b, b)
    norm_lhs = spectral_norm(new.b)
    norm_rhs = spectral_norm(b) / denom
    aux["norm_lhs"] = norm_lhs
    aux["norm_rhs"] = norm_rhs
    holds = lhs <= rhs + tol.tol_eq and norm_lhs <= norm_rhs + tol.tol_eq
    return BoundReport("thm3.4", n, kap, True, lhs, rhs, rhs - lhs, holds, aux)


def bound_thm36(a, p, q, q_prime, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Moving the kernel idempotent: certified bound plus a representation.

    Hypothesis ||q - q'|| < 1/(2+kappa). Then the inverse for (p, q')
    exists, with relative change at most (1+kappa) d / (1 - kappa d) and
    norm at most (1+d)/(1 - kappa d) ||b||. The witness representation
    b + b (a v)^(1,5) a (v - w)(1 - a b) is evaluated with v built for
    (p, q') and its deviation reported in aux; an alternative witness built
    on (q', q) is feasible only when rank q' + rank q = n and is reported
    as a separate diagnostic.
    """
    a = as_matrix(a)
    base = compute_outer_pql(a, p, q, tol)
    b = base.b
    kap = kappa(a, b)
    p = p if isinstance(p, Idempotent) else idempotent_from_matrix(p, tol)
    q = q if isinstance(q, Idempotent) else idempotent_from_matrix(q, tol)
    q_prime = q_prime if isinstance(q_prime, Idempotent) else idempotent_from_matrix(q_prime, tol)
    dq = spectral_norm(q_prime.m - q.m)
    threshold = 1.0 / (2.0 + kap)
    n = a.shape[0]
    aux = {"dq": dq, "threshold_dq": threshold}
    if not dq < threshold - tol.tol_eq:
        return _vacuous("thm3.6", n, kap, aux)
    denom = 1.0 - kap * dq
    rhs = (1.0 + kap) * dq / denom
    try:
        new = compute_outer_pql(a, p, q_prime, tol)
    except NotExists:
        aux["exists"] = 0.0
        return BoundReport("thm3.6", n, kap, True, math.inf, rhs, -math.inf, False, aux)
    aux["exists"] = 1.0
    lhs = _relative_lhs(new.b, b)
    norm_lhs = spectral_norm(new.b)
    norm_rhs = (1.0 + dq) / denom * spectral_norm(b)
    aux["norm_lhs"] = norm_lhs
    aux["norm_rhs"] = norm_rhs

    eye = np.eye(n, dtype=complex)
    try:
        v = build_witness(p, q_prime, tol).w
        w = build_witness(p, q, tol).w
        rep = b + b @ one_five_inverse(a @ v, tol) @ a @ (v - w) @ (eye - a @ b)
        aux["representation_deviation"] = spectral_norm(rep - new.b)
    except (NotExists, DimMismatch):
        aux["representation_deviation"] = math.inf
    # The literal reading of the alternative witness convention needs
    # rank q' + rank q = n, which generically fails; report, don't gate.
    stmt_feasible = q_prime.rank + q.rank == n
    aux["statement_witness_feasible"] = 1.0 if stmt_feasible else 0.0
    if stmt_feasible:
        try:
            v2 = build_witness(q_prime, q, tol).w
            rep2 = b + b @ one_five_inverse(a @ v2, tol) @ a @ (v2 - w) @ (eye - a @ b)
            aux["statement_rep_deviation"] = spectral_norm(rep2 - new.b)
        except (NotExists, DimMismatch):
            aux["statement_rep_deviation"] = math.inf

    holds = lhs <= rhs + tol.tol_eq and norm_lhs <= norm_rhs + tol.tol_eq
    return BoundReport("thm3.6", n, kap, True, lhs, rhs, rhs - lhs, holds, aux)


def bound_thm38(a, p, q, p_prime, q_prime, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Moving both idempotents: combined certified bound."""
    a = as_matrix(a)
    base = compute_outer_pql(a, p, q, tol)
    b = base.b
    kap = kappa(a, b)
    p = p if isinstance(p, Idempotent) else idempotent_from_matrix(p, tol)
    q = q if isinstance(q, Idempotent) else idempotent_from_matrix(q, tol)
    p_prime = p_prime if isinstance(p_prime, Idempotent) else idempotent_from_matrix(p_prime, tol)
    q_prime = q_prime if isinstance(q_prime, Idempotent) else idempotent_from_matrix(q_prime, tol)
    dp = spectral_norm(p_prime.m - p.m)
    dq = spectral_norm(q_prime.m - q.m)
    thr_p = 1.0 / (1.0 + kap) ** 2
    thr_q = 1.0 / (3.0 + kap)
    n = a.shape[0]
    aux = {"dp": dp, "dq": dq, "threshold_dp": thr_p, "threshold_dq": thr_q}
    if not (dp < thr_p - tol.tol_eq and dq < thr_q - tol.tol_eq):
        return _vacuous("thm3.8", n, kap, aux)
    denom = 1.0 - (1.0 + kap) * dp - kap * dq
    rhs = (1.0 + kap) * (dp + dq) / denom
    try:
        new = compute_outer_pql(a, p_prime, q_prime, tol)
    except NotExists:
        aux["exists"] = 0.0
        return BoundReport("thm3.8", n, kap, True, math.inf, rhs, -math.inf, False, aux)
    aux["exists"] = 1.0
    lhs = _relative_lhs(new.b, b)
    norm_lhs = spectral_norm(new.b)
    norm_rhs = (1.0 + dq) * spectral_norm(b) / denom
    aux["norm_lhs"] = norm_lhs
    aux["norm_rhs"] = norm_rhs
    holds = lhs <= rhs + tol.tol_eq and norm_lhs <= norm_rhs + tol.tol_eq
    return BoundReport("thm3.8", n, kap, True, lhs, rhs, rhs - lhs, holds, aux)


def bound_thm39(a, delta_a, p, q, p_prime, q_prime, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Moving the matrix and both idempotents at once.

    Three hypotheses: the two of the combined bound plus
    ||b|| ||delta_a|| < 2 kappa / ((kappa+1)(kappa+4)). The report's main
    inequality is the absolute difference bound; the norm bound for the new
    inverse sits in aux.
    """
    a = as_matrix(a)
    delta_a = as_matrix(delta_a)
    if delta_a.shape != a.shape:
        raise DimMismatch("delta_a must match a")
    base = compute_outer_pql(a, p, q, tol)
    b = base.b
    kap = kappa(a, b)
    p = p if isinstance(p, Idempotent) else idempotent_from_matrix(p, tol)
    q = q if isinstance(q, Idempotent) else idempotent_from_matrix(q, tol)
    p_prime = p_prime if isinstance(p_prime, Idempotent) else idempotent_from_matrix(p_prime, tol)
    q_prime = q_prime if isinstance(q_prime, Idempotent) else idempotent_from_matrix(q_prime, tol)
    dp = spectral_norm(p_prime.m - p.m)
    dq = spectral_norm(q_prime.m - q.m)
    nd = spectral_norm(delta_a)
    nb = spectral_norm(b)
    thr_p = 1.0 / (1.0 + kap) ** 2
    thr_q = 1.0 / (3.0 + kap)
    thr_d = 2.0 * kap / ((kap + 1.0) * (kap + 4.0))
    n = a.shape[0]
    aux = {
        "dp": dp,
        "dq": dq,
        "b_norm_times_delta": nb * nd,
        "threshold_dp": thr_p,
        "threshold_dq": thr_q,
        "threshold_delta": thr_d,
    }
    hyp = (
        dp < thr_p - tol.tol_eq
        and dq < thr_q - tol.tol_eq
        and nb * nd < thr_d - tol.tol_eq
    )
    if not hyp:
        return _vacuous("thm3.9", n, kap, aux)
    denom = 1.0 - (1.0 + kap) * dp - kap * dq
    denom_full = denom - (1.0 + dq) * nb * nd
    if denom_full <= 0:
        rhs = math.inf
        norm_rhs = math.inf
    else:
        rhs = (nb / denom) * ((1.0 + kap) * (dp + dq) + (1.0 + dq) ** 2 * nd * nb / denom_full)
        norm_rhs = (1.0 + dq) * nb / denom_full
    a_bar = a + delta_a
    try:
        new = compute_outer_pql(a_bar, p_prime, q_prime, tol)
    except NotExists:
        aux["exists"] = 0.0
        return BoundReport("thm3.9", n, kap, True, math.inf, rhs, -math.inf, False, aux)
    aux["exists"] = 1.0
    lhs = spectral_norm(new.b - b)
    norm_lhs = spectral_norm(new.b)
    aux["norm_lhs"] = norm_lhs
    aux["norm_rhs"] = norm_rhs
    holds = lhs <= rhs + tol.tol_eq and norm_lhs <= norm_rhs + tol.tol_eq
    return BoundReport("thm3.9", n, kap, True, lhs, rhs, rhs - lhs, holds, aux)


def _strict_base(a, p, q, tol: Tolerances) -> GInvResult:
    base = compute_outer_pql(a, p, q, tol)
    if not base.flags["strict_12"]:
        raise NotExists(
            "the base inverse is not a strict two-sided inverse for (p, q); "
            "these variants need b a = p and 1 - a b = q exactly"
        )
    return base


def cor_12_variants(a, p, q, p_prime=None, q_prime=None, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Strict-inverse variants of the idempotent-motion bounds.

    Side conditions keep a pinned to the moved idempotents: a p' = a when
    the range side moves, (1 - q') a = a when the kernel side moves; the
    bounds then match the corresponding general theorems, and the perturbed
    inverse must itself be strict. For the kernel-side variant the group
    representation b + b (a v)^# a (v - b) q with v the new inverse is
    evaluated into aux.
    """
    a = as_matrix(a)
    if p_prime is None and q_prime is None:
        raise InputError("one of p_prime, q_prime is required")
    p = p if isinstance(p, Idempotent) else idempotent_from_matrix(p, tol)
    q = q if isinstance(q, Idempotent) else idempotent_from_matrix(q, tol)
    if p_prime is not None and not isinstance(p_prime, Idempotent):
        p_prime = idempotent_from_matrix(p_prime, tol)
    if q_prime is not None and not isinstance(q_prime, Idempotent):
        q_prime = idempotent_from_matrix(q_prime, tol)
    na = spectral_norm(a)
    if p_prime is not None:
        resid = spectral_norm(a @ p_prime.m - a)
        if resid > tol.tol_eq * (1.0 + na) * (1.0 + spectral_norm(p_prime.m)):
            raise SideConditionViolated(f"a p' = a fails by {resid:.3e}")
    if q_prime is not None:
        resid = spectral_norm(q_prime.m @ a)
        if resid > tol.tol_eq * (1.0 + na) * (1.0 + spectral_norm(q_prime.m)):
            raise SideConditionViolated(f"(1 - q') a = a fails by {resid:.3e}")

    base = _strict_base(a, p, q, tol)
    b = base.b
    nb = spectral_norm(b)
    kap = na * nb
    n = a.shape[0]

    if p_prime is not None and q_prime is None:
        inner = bound_thm34(a, p, q, p_prime, tol)
        label, new_pair = "cor3.11", (p_prime, q)
    elif q_prime is not None and p_prime is None:
        inner = bound_thm36(a, p, q, q_prime, tol)
        label, new_pair = "cor3.12", (p, q_prime)
    else:
        inner = bound_thm38(a, p, q, p_prime, q_prime, tol)
        label, new_pair = "cor3.13", (p_prime, q_prime)

    aux = dict(inner.aux)
    if not inner.hypothesis_satisfied:
        return _vacuous(label, n, kap, aux)
    holds = inner.holds
    if aux.get("exists"):
        new = compute_outer_pql(a, new_pair[0], new_pair[1], tol)
        strict_ok = new.flags["strict_12"]
        aux["new_inverse_strict"] = 1.0 if strict_ok else 0.0
        holds = holds and strict_ok
        if label == "cor3.12":
            v = new.b
            try:
                rep = b + b @ group_inverse(a @ v, tol) @ a @ (v - b) @ q.m
                aux["group_rep_deviation"] = spectral_norm(rep - new.b)
            except Exception:
                aux["group_rep_deviation"] = math.inf
    return BoundReport(label, n, kap, True, inner.lhs, inner.rhs, inner.margin, holds, aux)
