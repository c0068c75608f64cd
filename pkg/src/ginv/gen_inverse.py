"""Generalized inverses with prescribed range and kernel.

Given a square matrix a and idempotents p, q, the central object is the
matrix b with b a b = b whose column space equals col(p) and whose null
space equals col(q). When it exists it is unique, and it is computed here
by one small dense solve: with U an orthonormal basis of col(p) and M0 the
adjoint basis of col(q)'s orthogonal complement, b = U (M0 a U)^{-1} M0.
The invertibility of the core M0 a U is exactly the existence condition,
and its smallest singular value is reported as the margin.

The module also provides group, inner, and commuting inner inverses, plus
witness-based representation formulas that rebuild the same b through
independent routes (useful as cross-checks).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    BadWitness,
    DimMismatch,
    ExactSingular,
    IllConditioned,
    NoGroupInverse,
    NotExists,
    RepresentationMismatch,
)
from .exact import ExactMatrix
from .idempotents import Idempotent, idempotent_from_matrix
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    rank,
    spectral_norm,
    try_inverse,
)
from .randomstream import RandomStream
from .subspaces import (
    Subspace,
    canonical_basis,
    direct_sum_is_all,
    gap,
    intersection_trivial,
    kernel_of,
    map_subspace,
    orthocomplement,
    range_of,
)

__all__ = [
    "ExistenceReport",
    "GInvResult",
    "Witness",
    "exists_outer_pql",
    "compute_outer_pql",
    "compute_outer_pql_exact",
    "exists_l",
    "compute_l",
    "classify_strict",
    "group_inverse",
    "one_five_inverse",
    "inner_inverse",
    "build_witness",
    "representation_15",
    "representation_group_12",
    "exists_dual_check",
]


@dataclass(frozen=True)
class ExistenceReport:
    """Boolean breakdown of the existence conditions plus the numeric margin.

    exists is the conjunction of the three booleans and a positive core
    margin; certificates, present only when exists, is a pair (t, s) of
    matrices witnessing the splitting (here t = s = b).
    """

    trivial_kernel_intersection: bool
    direct_sum: bool
    dims_compatible: bool
    sigma_min_core: float
    exists: bool
    certificates: Optional[tuple] = None


@dataclass(frozen=True)
class GInvResult:
    b: np.ndarray
    flags: dict
    residuals: dict

    def __repr__(self):
        on = [k for k, v in self.flags.items() if v]
        return f"GInvResult(n={self.b.shape[0]}, flags={'+'.join(on) or 'none'})"


@dataclass(frozen=True)
class Witness:
    """A matrix w with certified column space and null space."""

    w: np.ndarray
    certified_range: Subspace
    certified_kernel: Subspace


def _as_idempotent(x, tol: Tolerances) -> Idempotent:
    return x if isinstance(x, Idempotent) else idempotent_from_matrix(x, tol)


def _check_inputs(a: np.ndarray, p: Idempotent, q: Idempotent) -> None:
    if a.shape[0] != a.shape[1]:
        raise DimMismatch("a must be square")
    if p.n != a.shape[0] or q.n != a.shape[0]:
        raise DimMismatch("idempotents must match the size of a")


def _sigma_min(m: np.ndarray) -> float:
    if m.shape[0] == 0 and m.shape[1] == 0:
        return float("inf")
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[-1])


def _random_unitary(stream: RandomStream, k: int) -> np.ndarray:
    g = stream.normal_matrix(k, k)
    qm, r = np.linalg.qr(g)
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    return qm * (d / np.abs(d))


def _core_matrices(a, p: Idempotent, q: Idempotent, basis_seed=None):
    """U, M0, and the core M0 a U.

    U spans col(p); the rows of M0 span the orthogonal complement of col(q),
    so that null(M0) = col(q). With basis_seed set, both bases are rotated
    by random unitaries; the assembled b must not change (uniqueness).
    """
    u = p.range.basis
    m0 = orthocomplement(q.range).basis.conj().T
    if basis_seed is not None:
        stream = RandomStream(basis_seed)
        if u.shape[1]:
            u = u @ _random_unitary(stream, u.shape[1])
        if m0.shape[0]:
            m0 = _random_unitary(stream, m0.shape[0]) @ m0
    return u, m0, m0 @ a @ u


def _existence(a, p: Idempotent, q: Idempotent, tol: Tolerances, l_mode: bool):
    """Shared boolean evaluation for the outer and inner-outer variants."""
    n = a.shape[0]
    na = spectral_norm(a)
    scale = max(na, 1.0)
    ker_a = kernel_of(a, tol, scale=scale)
    trivial = intersection_trivial(ker_a, p.range, tol)
    if l_mode:
        dsum = direct_sum_is_all(range_of(a, tol, scale=scale), q.range, tol)
    else:
        dsum = direct_sum_is_all(map_subspace(a, p.range, tol), q.range, tol)
    dims = p.rank + q.rank == n
    u, m0, core = _core_matrices(a, p, q)
    smin = _sigma_min(core)
    exists = trivial and dsum and dims and smin > tol.tol_inv * na
    return trivial, dsum, dims, smin, exists, u, m0, core


def _solve(a, u, m0, core, tol: Tolerances) -> np.ndarray:
    inv = try_inverse(core, tol)
    if inv is None:
        smin = _sigma_min(core)
        raise IllConditioned(f"core matrix is numerically singular (sigma_min = {smin:.3e})")
    return u @ inv @ m0


def exists_outer_pql(a, p, q, tol: Tolerances = DEFAULT_TOL) -> ExistenceReport:
    """Does the outer inverse with range col(p) and kernel col(q) exist?

    Checks, in subspace form: null(a) meets col(p) trivially, a*col(p) and
    col(q) split the whole space, and rank p + rank q = n. The core margin
    sigma_min(M0 a U) certifies the same thing numerically. The report is
    always produced; when the inverse exists the certificate pair (t, s)
    with t = s = b is attached.
    """
    a = as_matrix(a)
    p = _as_idempotent(p, tol)
    q = _as_idempotent(q, tol)
    _check_inputs(a, p, q)
    trivial, dsum, dims, smin, exists, u, m0, core = _existence(a, p, q, tol, l_mode=False)
    certs = None
    if exists:
        b = _solve(a, u, m0, core, tol)
        certs = (b, b)
    return ExistenceReport(trivial, dsum, dims, smin, exists, certs)


def compute_outer_pql(a, p, q, tol: Tolerances = DEFAULT_TOL, *, basis_seed=None) -> GInvResult:
    """The outer inverse b with col(b) = col(p) and null(b) = col(q).

    Raises NotExists when the subspace conditions fail, IllConditioned when
    they pass but the core is numerically singular. basis_seed rotates the
    internal orthonormal bases; the result must agree (b is unique).
    """
    a = as_matrix(a)
    p = _as_idempotent(p, tol)
    q = _as_idempotent(q, tol)
    _check_inputs(a, p, q)
    trivial, dsum, dims, smin, exists, u, m0, core = _existence(a, p, q, tol, l_mode=False)
    if not (trivial and dsum and dims):
        raise NotExists(
            "no outer inverse with the prescribed range and kernel: "
            f"trivial_kernel_intersection={trivial}, direct_sum={dsum}, dims_compatible={dims}"
        )
    if not smin > tol.tol_inv * spectral_norm(a):
        raise IllConditioned(f"core margin too small (sigma_min = {smin:.3e})")
    if basis_seed is not None:
        u, m0, core = _core_matrices(a, p, q, basis_seed)
    b = _solve(a, u, m0, core, tol)
    return classify_strict(a, p, q, b, tol)


def exists_l(a, p, q, tol: Tolerances = DEFAULT_TOL) -> ExistenceReport:
    """Existence of the inner-and-outer variant (a b a = a as well).

    Requires col(a) and col(q) to split the space and null(a) and col(p) to
    split the space. The report reuses the same fields: direct_sum here
    refers to col(a) + col(q)."""
    a = as_matrix(a)
    p = _as_idempotent(p, tol)
    q = _as_idempotent(q, tol)
    _check_inputs(a, p, q)
    trivial, dsum, dims, smin, exists, u, m0, core = _existence(a, p, q, tol, l_mode=True)
    certs = None
    if exists:
        b = _solve(a, u, m0, core, tol)
        certs = (b, b)
    return ExistenceReport(trivial, dsum, dims, smin, exists, certs)


def compute_l(a, p, q, tol: Tolerances = DEFAULT_TOL) -> GInvResult:
    """Compute the inverse and insist that a b a = a holds as well."""
    a = as_matrix(a)
    p = _as_idempotent(p, tol)
    q = _as_idempotent(q, tol)
    _check_inputs(a, p, q)
    report = exists_l(a, p, q, tol)
    if not report.exists:
        raise NotExists(
            "no inner-outer inverse for these idempotents: "
            f"trivial_kernel_intersection={report.trivial_kernel_intersection}, "
            f"direct_sum={report.direct_sum}, dims_compatible={report.dims_compatible}, "
            f"sigma_min_core={report.sigma_min_core:.3e}"
        )
    result = compute_outer_pql(a, p, q, tol)
    if not result.flags["l_inverse"]:
        raise NotExists(f"a b a = a fails: residual {result.residuals['aba_a']:.3e}")
    return result


def classify_strict(a, p, q, b, tol: Tolerances = DEFAULT_TOL) -> GInvResult:
    """All six defining residuals of b, with the derived boolean flags.

    outer_pql needs b a b = b and the two subspace gaps small; l_inverse
    needs a b a = a; strict_pq needs the exact products b a = p and
    1 - a b = q; strict_12 is both. Thresholds are relative to the norms
    of the factors entering each residual.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    p = _as_idempotent(p, tol)
    q = _as_idempotent(q, tol)
    _check_inputs(a, p, q)
    if b.shape != a.shape:
        raise DimMismatch("b must have the same shape as a")
    n = a.shape[0]
    eye = np.eye(n, dtype=complex)
    na = spectral_norm(a)
    nb = spectral_norm(b)
    ab = a @ b
    ba = b @ a
    residuals = {
        "bab_b": spectral_norm(ba @ b - b),
        "aba_a": spectral_norm(ab @ a - a),
        "ba_p": spectral_norm(ba - p.m),
        "one_ab_q": spectral_norm(eye - ab - q.m),
        "gap_range": gap(range_of(b, tol, scale=max(nb, 1.0)), p.range).gap,
        "gap_kernel": gap(kernel_of(b, tol, scale=max(nb, 1.0)), q.range).gap,
    }
    e = tol.tol_eq
    outer = (
        residuals["bab_b"] <= e * (1.0 + na * nb * nb)
        and residuals["gap_range"] <= 10 * e
        and residuals["gap_kernel"] <= 10 * e
    )
    l_inverse = residuals["aba_a"] <= e * (1.0 + na * na * nb)
    strict_pq = residuals["ba_p"] <= e * (1.0 + na * nb + spectral_norm(p.m)) and residuals[
        "one_ab_q"
    ] <= e * (1.0 + na * nb + spectral_norm(q.m))
    flags = {
        "outer_pql": outer,
        "l_inverse": l_inverse,
        "strict_pq": strict_pq,
        "strict_12": strict_pq and l_inverse,
    }
    return GInvResult(b=b, flags=flags, residuals=residuals)


def group_inverse(x, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """The commuting inverse on the range of x, when x has index at most 1.

    Built from a rank factorization x = F G: the inverse is F (G F)^-2 G,
    and it exists exactly when G F is invertible.
    """
    x = as_matrix(x)
    if x.shape[0] != x.shape[1]:
        raise DimMismatch("group inverse needs a square matrix")
    n = x.shape[0]
    if n == 0:
        return x.copy()
    um, s, vh = np.linalg.svd(x)
    r = rank(x, tol)
    if r == 0:
        return np.zeros_like(x)
    f = um[:, :r] * s[:r]
    g = vh[:r, :]
    gf = g @ f
    inv = try_inverse(gf, tol)
    if inv is None:
        raise NoGroupInverse("index exceeds 1 (rank-factor product is singular)")
    return f @ inv @ inv @ g


def one_five_inverse(x, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """A y with x y x = x and x y = y x; the group inverse serves."""
    try:
        return group_inverse(x, tol)
    except NoGroupInverse as exc:
        raise NotExists(f"no commuting inner inverse: {exc}") from exc


def inner_inverse(x, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """A y with x y x = x; the pseudoinverse is the canonical pick."""
    x = as_matrix(x)
    if x.size == 0:
        return x.conj().T.copy()
    return np.linalg.pinv(x, rcond=tol.tol_rank * max(x.shape))


def build_witness(p, q, tol: Tolerances = DEFAULT_TOL) -> Witness:
    """A matrix w with col(w) = col(p) and null(w) = col(q).

    Needs rank p + rank q = n. Constructed as U Q* from orthonormal bases
    of col(p) and of col(q)'s orthogonal complement; canonical bases are
    used so the witness is a function of the subspaces, not of SVD
    conventions.
    """
    p = _as_idempotent(p, tol)
    q = _as_idempotent(q, tol)
    if p.n != q.n:
        raise DimMismatch("idempotents live in different dimensions")
    if p.rank + q.rank != p.n:
        raise DimMismatch(f"rank p ({p.rank}) + rank q ({q.rank}) must equal n ({p.n})")
    u = canonical_basis(p.range)
    qb = canonical_basis(orthocomplement(q.range))
    w = u @ qb.conj().T
    return Witness(w=w, certified_range=p.range, certified_kernel=q.range)


def representation_15(a, p, q, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Rebuild the outer inverse through a witness and commuting inverses.

    With w the witness for (p, q), the three expressions
    (wa)^(1,5) w,  w (aw)^(1,5),  w (waw)^- w
    must all equal the directly computed inverse. Any pairwise disagreement
    raises RepresentationMismatch: it signals a bug or a tolerance breach,
    not a property of the input.
    """
    a = as_matrix(a)
    p = _as_idempotent(p, tol)
    q = _as_idempotent(q, tol)
    direct = compute_outer_pql(a, p, q, tol)
    w = build_witness(p, q, tol).w
    wa = w @ a
    aw = a @ w
    e1 = one_five_inverse(wa, tol) @ w
    e2 = w @ one_five_inverse(aw, tol)
    e3 = w @ inner_inverse(w @ a @ w, tol) @ w
    ref = 1.0 + spectral_norm(direct.b)
    thresh = 100.0 * tol.tol_eq * ref * ref
    for name, expr in (("(wa)^(1,5) w", e1), ("w (aw)^(1,5)", e2), ("w (waw)^- w", e3)):
        d = spectral_norm(expr - direct.b)
        if d > thresh:
            raise RepresentationMismatch(f"{name} deviates from the direct inverse by {d:.3e}")
    return e1


def representation_group_12(a, w, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """The strict inverse from a witness with idempotent products.

    When wa and aw are idempotent, b = (wa)^# w = w (aw)^# satisfies all
    four equations b a b = b, a b a = a, b a = wa, 1 - a b = 1 - aw.
    BadWitness flags a w whose products fail these requirements;
    RepresentationMismatch flags disagreement between the two expressions.
    """
    a = as_matrix(a)
    w = as_matrix(w)
    if a.shape != w.shape or a.shape[0] != a.shape[1]:
        raise DimMismatch("a and w must be square of the same size")
    n = a.shape[0]
    eye = np.eye(n, dtype=complex)
    wa = w @ a
    aw = a @ w
    for name, m in (("wa", wa), ("aw", aw)):
        nm = spectral_norm(m)
        if spectral_norm(m @ m - m) > tol.tol_eq * (1.0 + nm * nm):
            raise BadWitness(f"{name} is not idempotent")
    b1 = group_inverse(wa, tol) @ w
    b2 = w @ group_inverse(aw, tol)
    scale = 1.0 + spectral_norm(b1)
    if spectral_norm(b1 - b2) > 100.0 * tol.tol_eq * scale * scale:
        raise RepresentationMismatch("(wa)^# w and w (aw)^# disagree")
    na = spectral_norm(a)
    nb = spectral_norm(b1)
    checks = (
        ("b a b = b", spectral_norm(b1 @ a @ b1 - b1), 1.0 + na * nb * nb),
        ("a b a = a", spectral_norm(a @ b1 @ a - a), 1.0 + na * na * nb),
        ("b a = wa", spectral_norm(b1 @ a - wa), 1.0 + na * nb),
        ("1 - a b = 1 - aw", spectral_norm(eye - a @ b1 - (eye - aw)), 1.0 + na * nb),
    )
    for name, resid, scale in checks:
        if resid > 100.0 * tol.tol_eq * scale:
            raise BadWitness(f"witness does not produce a strict inverse: {name} off by {resid:.3e}")
    return b1


def exists_dual_check(a, p, q, tol: Tolerances = DEFAULT_TOL) -> bool:
    """The same existence question asked through row spaces.

    Annihilator form of the left-sided conditions: rows killing a must meet
    rows of 1 - q trivially, and the row space of (1 - q) a together with
    the rows of 1 - p must fill the space. Everything reduces to column
    spaces of adjoints; must agree with exists_outer_pql on every input.
    """
    a = as_matrix(a)
    p = _as_idempotent(p, tol)
    q = _as_idempotent(q, tol)
    _check_inputs(a, p, q)
    scale = max(spectral_norm(a), 1.0)
    left_kernel_a = orthocomplement(range_of(a, tol, scale=scale))
    rows_one_minus_q = orthocomplement(q.range)
    cond1 = intersection_trivial(left_kernel_a, rows_one_minus_q, tol)
    rows_one_minus_q_a = map_subspace(a.conj().T, rows_one_minus_q, tol)
    rows_one_minus_p = orthocomplement(p.range)
    cond2 = direct_sum_is_all(rows_one_minus_q_a, rows_one_minus_p, tol)
    return cond1 and cond2


def compute_outer_pql_exact(a: ExactMatrix, p: ExactMatrix, q: ExactMatrix) -> ExactMatrix:
    """Exact-rational version of compute_outer_pql.

    Bases need not be orthonormal here: U holds the pivot columns of p and
    the rows of M0 are an exact basis of the annihilator of col(q). The
    result satisfies its defining equations with exact equality.
    """
    n = a.rows
    if a.cols != n or p.rows != n or p.cols != n or q.rows != n or q.cols != n:
        raise DimMismatch("exact inputs must be square matrices of one size")
    u = p.column_basis()
    nq = q.conj_transpose().null_basis()
    m0 = nq.conj_transpose()
    if u.cols != m0.rows:
        raise NotExists(f"rank p ({u.cols}) + rank q ({n - m0.rows}) must equal n ({n})")
    core = m0 @ a @ u
    try:
        inv = core.inverse()
    except ExactSingular as exc:
        raise NotExists("exact core is singular") from exc
    return u @ inv @ m0
