"""Construction, validation, and controlled perturbation of idempotent matrices.

An idempotent here is an oblique projector: it acts as the identity on its
range and kills its kernel, and the two subspaces split C^n. The range and
kernel are carried alongside the matrix so that later predicates never have
to recover them from a noisy difference like 1 - q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotComplementary, PerturbationTooLarge
from .linalg import DEFAULT_TOL, Tolerances, as_matrix, spectral_norm
from .randomstream import RandomStream
from .subspaces import (
    Subspace,
    direct_sum_is_all,
    kernel_of,
    orthocomplement,
    range_of,
    subspace_from_columns,
    zero_subspace,
)

__all__ = [
    "Idempotent",
    "projector",
    "oblique",
    "idempotent_from_matrix",
    "random_idempotent",
    "perturb_idempotent",
]


@dataclass(frozen=True, eq=False)
class Idempotent:
    """A validated idempotent matrix with its range and kernel subspaces."""

    m: np.ndarray
    range: Subspace
    kernel: Subspace

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @property
    def rank(self) -> int:
        return self.range.dim

    def complement(self) -> "Idempotent":
        """The idempotent 1 - p, with range and kernel swapped."""
        return Idempotent(np.eye(self.n, dtype=complex) - self.m, self.kernel, self.range)

    def __repr__(self):
        return f"Idempotent(n={self.n}, rank={self.rank})"


def projector(t: Subspace) -> Idempotent:
    """Hermitian projector onto t along its orthogonal complement."""
    return Idempotent(t.projector(), t, orthocomplement(t))


def oblique(t: Subspace, s: Subspace, tol: Tolerances = DEFAULT_TOL) -> Idempotent:
    """The unique idempotent with range t and kernel s.

    Requires t and s to be complementary. Built as [B_t B_s] diag(I, 0)
    [B_t B_s]^{-1}, so the result is idempotent up to the conditioning of the
    combined basis.
    """
    if not direct_sum_is_all(t, s, tol):
        raise NotComplementary("range and kernel candidates do not split C^n")
    n = t.ambient_dim
    if t.dim == 0:
        return Idempotent(np.zeros((n, n), dtype=complex), t, s)
    if t.dim == n:
        return Idempotent(np.eye(n, dtype=complex), t, s)
    x = np.hstack([t.basis, s.basis])
    d = np.zeros((n, n), dtype=complex)
    d[: t.dim, : t.dim] = np.eye(t.dim)
    # m = (x d) x^{-1}, computed by a solve against x^T on the right.
    m = np.linalg.solve(x.T, (x @ d).T).T
    return Idempotent(m, t, s)


def idempotent_from_matrix(m, tol: Tolerances = DEFAULT_TOL) -> Idempotent:
    """Validate that m is idempotent and attach its range and kernel."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError("idempotent must be square")
    nm = spectral_norm(a)
    resid = spectral_norm(a @ a - a)
    if resid > tol.tol_eq * (1.0 + nm * nm):
        raise ValueError(f"matrix is not idempotent: ||m^2 - m|| = {resid:.3e}")
    scale = max(nm, 1.0)
    rng = range_of(a, tol, scale=scale)
    ker = kernel_of(a, tol, scale=scale)
    return Idempotent(a, rng, ker)


def _as_stream(seed) -> RandomStream:
    return seed if isinstance(seed, RandomStream) else RandomStream(int(seed))


def random_idempotent(n: int, r: int, skew: float = 0.0, seed=0) -> Idempotent:
    """Random rank-r idempotent in C^n, deterministic per seed.

    skew = 0 gives a hermitian projector; larger skew tilts the kernel toward
    the range, which drives the norm of the idempotent up.
    """
    if not 0 <= r <= n:
        raise ValueError("rank out of range")
    stream = _as_stream(seed)
    if r == 0:
        return Idempotent(np.zeros((n, n), dtype=complex), zero_subspace(n), Subspace(n, np.eye(n, dtype=complex)))
    if r == n:
        return Idempotent(np.eye(n, dtype=complex), Subspace(n, np.eye(n, dtype=complex)), zero_subspace(n))
    for _ in range(32):
        t = subspace_from_columns(stream.normal_matrix(n, r))
        if t.dim != r:
            continue
        comp = orthocomplement(t)
        tilt = t.basis @ stream.normal_matrix(r, n - r) if skew else 0.0
        s = subspace_from_columns(comp.basis + skew * tilt if skew else comp.basis)
        if s.dim != n - r or not direct_sum_is_all(t, s):
            continue
        return oblique(t, s)
    raise PerturbationTooLarge("could not draw a complementary pair; skew too extreme")


def _cayley(k: np.ndarray, theta: float) -> np.ndarray:
    """Unitary Cayley rotation (1 - tk/2)^{-1}(1 + tk/2) of a skew-hermitian k."""
    eye = np.eye(k.shape[0], dtype=complex)
    return np.linalg.solve(eye - 0.5 * theta * k, eye + 0.5 * theta * k)


def _skew_direction(stream: RandomStream, n: int) -> np.ndarray:
    g = stream.normal_matrix(n, n)
    k = g - g.conj().T
    nk = spectral_norm(k)
    return k / nk if nk > 0 else k


def perturb_idempotent(
    p: Idempotent,
    magnitude: float,
    seed=0,
    tol: Tolerances = DEFAULT_TOL,
    mode: str = "both",
) -> Idempotent:
    """A nearby idempotent p' with ||p - p'|| at most `magnitude`.

    The range and kernel bases are rotated by random unitary rotations
    (Cayley form of a skew-hermitian direction); the rotation angle is found
    by bisection so the achieved distance lands close to, and never above,
    the requested magnitude. The result is re-assembled through `oblique`,
    so it is exactly idempotent up to that construction's conditioning.

    mode selects which subspace moves: "both", "range" (kernel pinned), or
    "kernel" (range pinned). Rank 0 and rank n idempotents admit no motion
    and are returned unchanged.
    """
    if magnitude < 0:
        raise ValueError("magnitude must be nonnegative")
    n = p.n
    if magnitude == 0 or p.rank in (0, n):
        return p
    if mode not in ("both", "range", "kernel"):
        raise ValueError(f"unknown mode {mode!r}")
    stream = _as_stream(seed)
    kt = _skew_direction(stream, n)
    ks = _skew_direction(stream, n)

    def build(theta: float):
        tb = _cayley(kt, theta) @ p.range.basis if mode in ("both", "range") else p.range.basis
        sb = _cayley(ks, theta) @ p.kernel.basis if mode in ("both", "kernel") else p.kernel.basis
        try:
            return oblique(subspace_from_columns(tb, tol), subspace_from_columns(sb, tol), tol)
        except NotComplementary:
            return None

    def dist(cand) -> float:
        return spectral_norm(cand.m - p.m)

    # Grow the angle until the requested distance is bracketed or the pair
    # stops being complementary.
    lo, hi = 0.0, 1e-4
    hi_cand = build(hi)
    while hi_cand is not None and dist(hi_cand) < magnitude and hi <= 64.0:
        lo = hi
        hi *= 2.0
        hi_cand = build(hi)

    if hi_cand is not None and dist(hi_cand) <= magnitude:
        # The rotation family saturates below the request; the farthest
        # sampled point still honors the distance bound.
        return hi_cand

    # Bisect between a known-good angle and the overshooting (or invalid) one.
    best = build(lo) if lo > 0 else None
    for _ in range(70):
        mid = 0.5 * (lo + hi)
        cand = build(mid)
        if cand is not None and dist(cand) <= magnitude:
            lo, best = mid, cand
        else:
            hi = mid
    if best is None or dist(best) == 0.0:
        raise PerturbationTooLarge("no usable rotation below the requested magnitude")
    return best
