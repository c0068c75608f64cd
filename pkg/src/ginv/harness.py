"""Scenario generation and verification campaigns.

A campaign draws deterministic random scenarios tailored to each check id,
runs the corresponding checker, and aggregates pass/fail counts plus worst
margins. Generation is reproducible from (config, seed, index): the same
configuration always yields the same scenarios and the same report apart
from wall time.

Check ids are opaque strings (see CHECKS); each maps to one verification
routine over a Scenario. The special id "selftest-bad-bound" deliberately
shrinks a correct bound a millionfold so the harness can prove it detects
violations.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GenerationFailed, GinvError, InputError, NotExists
from .gen_inverse import compute_outer_pql, exists_l, exists_outer_pql
from .idempotents import idempotent_from_matrix, oblique, perturb_idempotent, random_idempotent
from .linalg import DEFAULT_TOL, Tolerances, spectral_norm, try_inverse
from .perturbation import (
    Scenario,
    bound_thm34,
    bound_thm36,
    bound_thm38,
    bound_thm39,
    cor_12_variants,
    cor_lemas1,
    equivalence_cor28,
    equivalence_thm24,
    equivalence_thm27,
    equivalence_thm212,
    equivalence_thm_tm27,
    gap_sufficient_lemma210,
    kappa,
    lemma26_f,
)
from .randomstream import RandomStream
from .serialize import (
    bound_report_to_json,
    equivalence_report_to_json,
    implication_report_to_json,
    scenario_to_json,
)
from .subspaces import Subspace, direct_sum_is_all, orth_basis, range_of

__all__ = [
    "EnsembleConfig",
    "TheoremStats",
    "CampaignReport",
    "CHECKS",
    "gen_scenario",
    "run_check",
    "run_campaign",
]

# Fraction of each smallness threshold that generated perturbations may use.
THRESHOLD_HEADROOM = 0.9

_RETRIES = 64


@dataclass(frozen=True)
class EnsembleConfig:
    n_range: tuple = (2, 6)
    rank_range: tuple = (1, 5)
    skew: float = 0.3
    perturbation_magnitudes: tuple = (0.5,)
    count: int = 10
    seed: int = 0
    theorems: tuple = ("thm3.4",)
    tolerances: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "n_range", tuple(int(x) for x in self.n_range))
        object.__setattr__(self, "rank_range", tuple(int(x) for x in self.rank_range))
        object.__setattr__(
            self, "perturbation_magnitudes", tuple(float(x) for x in self.perturbation_magnitudes)
        )
        object.__setattr__(self, "theorems", tuple(str(t) for t in self.theorems))
        if len(self.n_range) != 2 or self.n_range[0] > self.n_range[1] or self.n_range[0] < 1:
            raise InputError(f"bad n_range {self.n_range}")
        if len(self.rank_range) != 2 or self.rank_range[0] > self.rank_range[1] or self.rank_range[0] < 0:
            raise InputError(f"bad rank_range {self.rank_range}")
        if self.count < 1:
            raise InputError("count must be at least 1")
        if not self.perturbation_magnitudes:
            raise InputError("perturbation_magnitudes must be nonempty")
        if any(m < 0 for m in self.perturbation_magnitudes):
            raise InputError("perturbation magnitudes must be nonnegative")
        for t in self.theorems:
            if t not in CHECKS:
                raise InputError(f"unknown check id {t!r}; known: {sorted(CHECKS)}")


@dataclass
class TheoremStats:
    instances: int = 0
    hypothesis_satisfied: int = 0
    holds: int = 0
    consistent: int = 0
    max_ratio: Optional[float] = None
    worst_margin: Optional[float] = None
    failures: list = field(default_factory=list)


@dataclass(frozen=True)
class CampaignReport:
    seed: int
    config: EnsembleConfig
    stats: dict
    wall_time: float

    @property
    def ok(self) -> bool:
        return all(not st.failures for st in self.stats.values())


# ---------------------------------------------------------------------------
# scenario generation


def _draw_rank(stream: RandomStream, config: EnsembleConfig, n: int) -> int:
    lo = max(1, config.rank_range[0])
    hi = min(n - 1, config.rank_range[1])
    if hi < lo:
        raise GenerationFailed(
            f"rank_range {config.rank_range} leaves no admissible rank for n={n}"
        )
    return stream.randint(lo, hi)


def _rank_r_matrix(stream: RandomStream, n: int, r: int) -> np.ndarray:
    return stream.normal_matrix(n, r) @ stream.normal_matrix(r, n)


def _base_outer(stream, n, r, skew, tol):
    """Full-rank a with random compatible idempotents."""
    a = stream.normal_matrix(n, n)
    p = random_idempotent(n, r, skew, stream)
    q = random_idempotent(n, n - r, skew, stream)
    if not exists_outer_pql(a, p, q, tol).exists:
        return None
    return a, p, q


def _base_outer_rank(stream, n, r, skew, tol):
    """Rank-r a whose column space avoids col(q): stable-capable base."""
    a = _rank_r_matrix(stream, n, r)
    p = random_idempotent(n, r, skew, stream)
    q = random_idempotent(n, n - r, skew, stream)
    if not exists_outer_pql(a, p, q, tol).exists:
        return None
    if not direct_sum_is_all(range_of(a, tol, scale=max(spectral_norm(a), 1.0)), q.range, tol):
        return None
    return a, p, q


def _base_l_aligned(stream, n, r, skew, tol):
    """Rank-r a with the kernel of q pinned to col(a), so a col(p) = ker q."""
    a = _rank_r_matrix(stream, n, r)
    col_a = range_of(a, tol, scale=max(spectral_norm(a), 1.0))
    t = Subspace(n, orth_basis(stream.normal_matrix(n, n - r), tol))
    if not direct_sum_is_all(t, col_a, tol):
        return None
    q = oblique(t, col_a, tol)
    p = random_idempotent(n, r, skew, stream)
    if not exists_l(a, p, q, tol).exists:
        return None
    return a, p, q


def _base_strict(stream, n, r, skew, tol):
    """a with an exactly strict inverse: p = ba, q = 1 - ab from the pseudoinverse."""
    a0 = _rank_r_matrix(stream, n, r)
    b0 = np.linalg.pinv(a0)
    eye = np.eye(n, dtype=complex)
    if skew > 0:
        g = stream.normal_matrix(n, n)
        t = eye + skew * g / max(spectral_norm(g), 1e-12)
        ti = np.linalg.inv(t)
        a = t @ a0 @ ti
        p_m = t @ (b0 @ a0) @ ti
        q_m = t @ (eye - a0 @ b0) @ ti
    else:
        a = a0
        p_m = b0 @ a0
        q_m = eye - a0 @ b0
    try:
        p = idempotent_from_matrix(p_m, tol)
        q = idempotent_from_matrix(q_m, tol)
    except GinvError:
        return None
    try:
        base = compute_outer_pql(a, p, q, tol)
    except NotExists:
        return None
    if not base.flags["strict_12"]:
        return None
    return a, p, q


def _delta_direction(stream, cls, a, b, p, q):
    """A perturbation direction of unit spectral norm in the requested class."""
    n = a.shape[0]
    if cls == "generic":
        d = stream.normal_matrix(n, n)
    elif cls == "stable":
        d = a @ stream.normal_matrix(n, n)
    elif cls == "destabilizing":
        y = q.range.basis @ stream.normal_matrix(q.rank, 1)
        d = y @ stream.normal_matrix(n, 1).conj().T
    elif cls == "strict-stable":
        eye = np.eye(n, dtype=complex)
        d = (eye - q.m) @ stream.normal_matrix(n, n) @ p.m
    else:
        raise InputError(f"unknown perturbation class {cls!r}")
    norm = spectral_norm(d)
    if norm < 1e-12:
        return None
    return d / norm


def _make_delta(stream, cls, a, b, p, q, mag):
    n = a.shape[0]
    if cls == "zero":
        return np.zeros((n, n), dtype=complex)
    if cls == "singular":
        # rank-one shift tuned so 1 + delta_a b is exactly singular
        u = stream.normal_matrix(n, 1)
        v = stream.normal_matrix(n, 1)
        s = complex((v.conj().T @ b @ u)[0, 0])
        if abs(s) < 1e-8:
            return None
        return -(u @ v.conj().T) / s
    if mag == 0:
        return np.zeros((n, n), dtype=complex)
    d = _delta_direction(stream, cls, a, b, p, q)
    if d is None:
        return None
    scale = mag * max(spectral_norm(a), 1.0)
    if cls == "destabilizing":
        # the shift must visibly push the column space into col(q)
        scale = max(scale, 0.1 * max(spectral_norm(a), 1.0))
    return scale * d


# Profiles: (base family, cycle of delta classes, wants p', wants q', q' uses
# the combined threshold). Bound checks get their idempotent perturbations
# capped at THRESHOLD_HEADROOM times the applicable smallness threshold.
_PROFILES = {
    "thm2.4": ("outer", ("stable", "generic", "singular"), False, False),
    "lemma2.6": ("outer_rank", ("zero", "stable", "destabilizing"), False, False),
    "thm2.7": ("outer_rank", ("stable", "destabilizing"), False, False),
    "cor2.8": ("outer_rank", ("stable", "destabilizing"), False, False),
    "tm2.7": ("l_aligned", ("stable", "destabilizing"), False, False),
    "lemma2.10": ("l_aligned", ("stable", "generic", "destabilizing"), False, False),
    "lemas1": ("l_aligned", ("stable", "generic", "destabilizing"), False, False),
    "thm2.12": ("strict", ("strict-stable", "destabilizing"), False, False),
    "thm3.4": ("outer", ("zero",), True, False),
    "thm3.6": ("outer", ("zero",), False, True),
    "thm3.8": ("outer", ("zero",), True, True),
    "thm3.9": ("outer", ("generic",), True, True),
    "cor3.11": ("strict", ("zero",), True, False),
    "cor3.12": ("strict", ("zero",), False, True),
    "cor3.13": ("strict", ("zero",), True, True),
    "selftest-bad-bound": ("outer", ("zero",), True, False),
}

_BASES = {
    "outer": _base_outer,
    "outer_rank": _base_outer_rank,
    "l_aligned": _base_l_aligned,
    "strict": _base_strict,
}

_BOUND_IDS = {"thm3.4", "thm3.6", "thm3.8", "thm3.9", "cor3.11", "cor3.12", "cor3.13", "selftest-bad-bound"}

# Checks whose statement assumes 1 + b delta_a invertible; generation
# re-draws the rare degenerate shift instead of tripping that precondition.
_NEEDS_INVERTIBLE = {"thm2.7", "cor2.8", "lemma2.6", "thm2.12"}


def _q_threshold(theorem: str, kap: float) -> float:
    if theorem == "thm3.6" or theorem == "cor3.12":
        return 1.0 / (2.0 + kap)
    return 1.0 / (3.0 + kap)


def gen_scenario(config: EnsembleConfig, index: int, theorem: Optional[str] = None) -> Scenario:
    """The index-th scenario of the configured ensemble, tailored to a check id.

    Deterministic in (config.seed, index, theorem). Retries internal draws a
    bounded number of times and raises GenerationFailed when no admissible
    scenario can be built (for example when the rank range leaves no room).
    """
    if theorem is not None and theorem not in _PROFILES:
        raise InputError(f"unknown check id {theorem!r}")
    family, classes, want_p, want_q = _PROFILES.get(theorem, ("outer", ("generic",), True, True))
    tol = config.tolerances
    root = RandomStream(config.seed).spawn(index)
    mag = config.perturbation_magnitudes[index % len(config.perturbation_magnitudes)]
    cls = classes[index % len(classes)] if classes else "zero"
    last = "no admissible draw"
    for attempt in range(_RETRIES):
        stream = root.spawn(attempt)
        n = stream.randint(config.n_range[0], config.n_range[1])
        if n < 2:
            last = "n must be at least 2 for a nontrivial split"
            continue
        try:
            r = _draw_rank(stream, config, n)
        except GenerationFailed as e:
            raise GenerationFailed(str(e)) from None
        made = _BASES[family](stream, n, r, config.skew, tol)
        if made is None:
            last = f"base family {family} rejected the draw (attempt {attempt})"
            continue
        a, p, q = made
        try:
            b = compute_outer_pql(a, p, q, tol).b
        except NotExists:
            last = "base inverse vanished under tolerance"
            continue
        kap = kappa(a, b)
        nb = spectral_norm(b)

        p_prime = None
        q_prime = None
        delta = np.zeros((n, n), dtype=complex)
        try:
            if theorem in _BOUND_IDS:
                if want_p:
                    cap = THRESHOLD_HEADROOM / (1.0 + kap) ** 2
                    mode = "range" if family == "strict" else "both"
                    p_prime = perturb_idempotent(p, min(mag, cap), stream, tol, mode=mode)
                if want_q:
                    cap = THRESHOLD_HEADROOM * _q_threshold(theorem, kap)
                    mode = "range" if family == "strict" else "both"
                    q_prime = perturb_idempotent(q, min(mag, cap), stream, tol, mode=mode)
                if cls != "zero":
                    cap_d = THRESHOLD_HEADROOM * 2.0 * kap / ((kap + 1.0) * (kap + 4.0)) / max(nb, 1e-12)
                    d = _delta_direction(stream, cls, a, b, p, q)
                    if d is None:
                        last = "degenerate perturbation direction"
                        continue
                    delta = d * min(mag * max(spectral_norm(a), 1.0), cap_d)
            else:
                d = _make_delta(stream, cls, a, b, p, q, mag)
                if d is None:
                    last = "degenerate perturbation direction"
                    continue
                delta = d
                if want_p:
                    p_prime = perturb_idempotent(p, mag, stream, tol)
                if want_q:
                    q_prime = perturb_idempotent(q, mag, stream, tol)
        except GinvError as e:
            last = f"perturbation draw failed: {e}"
            continue
        if theorem in _NEEDS_INVERTIBLE:
            if try_inverse(np.eye(n, dtype=complex) + b @ delta, tol) is None:
                last = "shift made the update factor singular"
                continue
        return Scenario(a, delta, p, q, p_prime=p_prime, q_prime=q_prime, tol=tol)
    raise GenerationFailed(f"no scenario after {_RETRIES} attempts: {last}")


# ---------------------------------------------------------------------------
# checkers


def _need(s: Scenario, name: str):
    v = getattr(s, name)
    if v is None:
        raise InputError(f"this check needs the scenario field {name}")
    return v


def _check_bound34(s):
    return "bound", bound_thm34(s.a, s.p, s.q, _need(s, "p_prime"), s.tol)


def _check_bound36(s):
    return "bound", bound_thm36(s.a, s.p, s.q, _need(s, "q_prime"), s.tol)


def _check_bound38(s):
    return "bound", bound_thm38(s.a, s.p, s.q, _need(s, "p_prime"), _need(s, "q_prime"), s.tol)


def _check_bound39(s):
    return "bound", bound_thm39(s.a, s.delta_a, s.p, s.q, _need(s, "p_prime"), _need(s, "q_prime"), s.tol)


def _check_cor311(s):
    return "bound", cor_12_variants(s.a, s.p, s.q, p_prime=_need(s, "p_prime"), tol=s.tol)


def _check_cor312(s):
    return "bound", cor_12_variants(s.a, s.p, s.q, q_prime=_need(s, "q_prime"), tol=s.tol)


def _check_cor313(s):
    return "bound", cor_12_variants(
        s.a, s.p, s.q, p_prime=_need(s, "p_prime"), q_prime=_need(s, "q_prime"), tol=s.tol
    )


def _check_selftest(s):
    from dataclasses import replace

    r = bound_thm34(s.a, s.p, s.q, _need(s, "p_prime"), s.tol)
    if not r.hypothesis_satisfied:
        return "bound", replace(r, theorem="selftest-bad-bound")
    bad_rhs = r.rhs / 1e6
    holds = r.lhs <= bad_rhs + s.tol.tol_eq
    return "bound", replace(
        r, theorem="selftest-bad-bound", rhs=bad_rhs, margin=bad_rhs - r.lhs, holds=holds
    )


def _check_lemma26(s):
    _, rep = lemma26_f(s)
    return "equiv", rep


CHECKS = {
    "thm2.4": lambda s: ("equiv", equivalence_thm24(s)),
    "lemma2.6": _check_lemma26,
    "thm2.7": lambda s: ("equiv", equivalence_thm27(s)),
    "cor2.8": lambda s: ("equiv", equivalence_cor28(s)),
    "tm2.7": lambda s: ("equiv", equivalence_thm_tm27(s)),
    "lemma2.10": lambda s: ("impl", gap_sufficient_lemma210(s)),
    "lemas1": lambda s: ("impl", cor_lemas1(s)),
    "thm2.12": lambda s: ("equiv", equivalence_thm212(s)),
    "thm3.4": _check_bound34,
    "thm3.6": _check_bound36,
    "thm3.8": _check_bound38,
    "thm3.9": _check_bound39,
    "cor3.11": _check_cor311,
    "cor3.12": _check_cor312,
    "cor3.13": _check_cor313,
    "selftest-bad-bound": _check_selftest,
}


def run_check(theorem: str, scenario: Scenario):
    """Run one checker; returns (kind, report) with kind in bound/equiv/impl."""
    if theorem not in CHECKS:
        raise InputError(f"unknown check id {theorem!r}; known: {sorted(CHECKS)}")
    return CHECKS[theorem](scenario)


def _report_json(kind, report) -> dict:
    if kind == "bound":
        return bound_report_to_json(report)
    if kind == "equiv":
        return equivalence_report_to_json(report)
    return implication_report_to_json(report)


def _is_ok(kind, report) -> bool:
    if kind == "bound":
        return report.holds
    if kind == "equiv":
        return report.consistent
    return report.ok


def run_campaign(config: EnsembleConfig, on_report=None) -> CampaignReport:
    """Run every configured check over `count` fresh scenarios each.

    Failures are recorded as data (scenario dump plus the offending report),
    never raised; the report is identical for identical (config, seed) apart
    from wall time. `on_report(theorem, index, kind, report)` is called for
    every evaluated instance when given (for CSV export and the like).
    """
    t0 = time.perf_counter()
    stats = {}
    for theorem in config.theorems:
        st = TheoremStats()
        stats[theorem] = st
        for index in range(config.count):
            scenario = gen_scenario(config, index, theorem)
            st.instances += 1
            try:
                kind, report = run_check(theorem, scenario)
            except GinvError as e:
                st.failures.append(
                    {
                        "index": index,
                        "seed": config.seed,
                        "error": f"{type(e).__name__}: {e}",
                        "scenario": scenario_to_json(scenario),
                    }
                )
                continue
            if on_report is not None:
                on_report(theorem, index, kind, report)
            ok = _is_ok(kind, report)
            if kind == "bound":
                st.hypothesis_satisfied += 1 if report.hypothesis_satisfied else 0
                st.holds += 1 if report.holds else 0
                st.consistent += 1
                if report.hypothesis_satisfied:
                    if np.isfinite(report.rhs) and report.rhs > 0 and np.isfinite(report.lhs):
                        ratio = report.lhs / report.rhs
                        st.max_ratio = ratio if st.max_ratio is None else max(st.max_ratio, ratio)
                    if np.isfinite(report.margin):
                        st.worst_margin = (
                            report.margin
                            if st.worst_margin is None
                            else min(st.worst_margin, report.margin)
                        )
            else:
                st.hypothesis_satisfied += 1
                st.holds += 1 if ok else 0
                st.consistent += 1 if ok else 0
            if not ok:
                st.failures.append(
                    {
                        "index": index,
                        "seed": config.seed,
                        "report": _report_json(kind, report),
                        "scenario": scenario_to_json(scenario),
                    }
                )
    return CampaignReport(config.seed, config, stats, time.perf_counter() - t0)
