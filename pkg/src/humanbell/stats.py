"""Correlation, CHSH and retarded-CHSH estimators over coincidence logs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .records import RecordTable

TSIRELSON = 2.0 * math.sqrt(2.0)


class InsufficientData(ValueError):
    """A CHSH cell is empty under the requested condition."""


@dataclass(frozen=True)
class CorrelationEstimate:
    e_hat: float
    n: int
    stderr: float

    @property
    def empty(self) -> bool:
        return self.n == 0


# returned whenever no record survives the selection
EMPTY = CorrelationEstimate(math.nan, 0, math.nan)


@dataclass(frozen=True)
class ChshEstimate:
    s: float
    stderr: float
    sigma_violation: float
    combination: tuple[str, str, str, str]
    cells: tuple[CorrelationEstimate, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class Condition:
    """Record selection applied on top of the actual-setting cell.

    internal: "both", "neither", "not-both", "a-only", "b-only" or None.
    """

    internal: Optional[str] = None
    retarded: Optional[tuple[int, int]] = None
    template: Optional[int] = None

    _INTERNAL = ("both", "neither", "not-both", "a-only", "b-only")

    def __post_init__(self) -> None:
        if self.internal is not None and self.internal not in self._INTERNAL:
            raise ValueError(f"unknown internal condition {self.internal!r}")

    def mask(self, t: RecordTable) -> np.ndarray:
        m = np.ones(len(t), dtype=bool)
        ia, ib = t.internal_a, t.internal_b
        if self.internal == "both":
            m &= ia & ib
        elif self.internal == "neither":
            m &= ~ia & ~ib
        elif self.internal == "not-both":
            m &= ~(ia & ib)
        elif self.internal == "a-only":
            m &= ia & ~ib
        elif self.internal == "b-only":
            m &= ~ia & ib
        if self.retarded is not None:
            m &= (t.retarded_a == self.retarded[0]) & (t.retarded_b == self.retarded[1])
        if self.template is not None:
            # template filtering only makes sense on doubly-internal records
            m &= ia & ib & (t.template_a == self.template) & (t.template_b == self.template)
        return m

    def label(self) -> str:
        parts = []
        if self.internal:
            parts.append(f"internal-{self.internal}")
        if self.retarded is not None:
            parts.append(f"retarded={self.retarded[0]},{self.retarded[1]}")
        if self.template is not None:
            parts.append(f"template={self.template}")
        return "+".join(parts) or "all"


ALL = Condition()
INTERNAL_BOTH = Condition(internal="both")
EXTERNAL = Condition(internal="neither")
COMPLEMENT = Condition(internal="not-both")


def parse_condition(text: str | None) -> Condition:
    """Parse CLI condition strings such as ``internal-both``, ``retarded=0,1``,
    ``template=2``, or several joined with ``+``."""
    if not text or text == "all":
        return ALL
    internal = retarded = template = None
    for part in text.split("+"):
        part = part.strip()
        if part.startswith("internal-"):
            internal = part[len("internal-"):]
        elif part in ("external", "neither"):
            internal = "neither"
        elif part == "complement":
            internal = "not-both"
        elif part.startswith("retarded="):
            ra, rb = part.split("=", 1)[1].split(",")
            retarded = (int(ra), int(rb))
        elif part.startswith("template="):
            template = int(part.split("=", 1)[1])
        else:
            raise ValueError(f"cannot parse condition {part!r}")
    return Condition(internal, retarded, template)


def _estimate(xy: np.ndarray) -> CorrelationEstimate:
    n = len(xy)
    if n == 0:
        return EMPTY
    agree = int(np.count_nonzero(xy > 0))
    e = (2 * agree - n) / n
    return CorrelationEstimate(e, n, math.sqrt(max(0.0, 1.0 - e * e) / n))


def estimate_correlation(records, a_index: int, b_index: int, condition: Condition = ALL) -> CorrelationEstimate:
    t = RecordTable.coerce(records)
    m = condition.mask(t) & (t.setting_a == a_index) & (t.setting_b == b_index)
    return _estimate(t.outcome_a[m].astype(np.int16) * t.outcome_b[m])


def chsh(records, quad: tuple[int, int, int, int] = (0, 1, 0, 1), condition: Condition = ALL,
         angles: tuple[tuple[float, ...], tuple[float, ...]] | None = None) -> ChshEstimate:
    """S = E(a', b') + E(a', b) + E(a, b') - E(a, b).

    ``quad`` holds setting indices (a, a', b, b').
    """
    a, a2, b, b2 = quad
    t = RecordTable.coerce(records)
    pairs = [(a2, b2), (a2, b), (a, b2), (a, b)]
    signs = (1, 1, 1, -1)
    cells = tuple(estimate_correlation(t, i, j, condition) for i, j in pairs)
    empty = [p for p, c in zip(pairs, cells) if c.empty]
    if empty:
        raise InsufficientData(f"empty CHSH cells {empty} under condition {condition.label()}")
    s = sum(sg * c.e_hat for sg, c in zip(signs, cells))
    se = math.sqrt(sum(c.stderr ** 2 for c in cells))
    sigma = (abs(s) - 2.0) / se if se > 0 else (math.inf if abs(s) > 2 else -math.inf)
    if angles is None:
        labels = tuple(f"({i},{j})" for i, j in pairs)
    else:
        labels = tuple(f"({angles[0][i]:.4f},{angles[1][j]:.4f})" for i, j in pairs)
    return ChshEstimate(s, se, sigma, labels, cells)


@dataclass(frozen=True)
class ShiftReport:
    s_full: ChshEstimate
    s_internal: Optional[ChshEstimate]
    s_complement: ChshEstimate
    s_external: Optional[ChshEstimate]
    internal_fraction: float
    internal_count: int
    n: int
    alpha_expected: float
    mixture_prediction: Optional[float]
    max_cell_identity_error: float

    @property
    def alpha_sigma(self) -> float:
        """Binomial standard error of the internal fraction at alpha_expected."""
        p = self.alpha_expected
        return math.sqrt(p * (1 - p) / self.n) if self.n else math.nan

    @property
    def alpha_z(self) -> float:
        return (self.internal_fraction - self.alpha_expected) / self.alpha_sigma

    @property
    def shift_coefficient(self) -> Optional[float]:
        """Empirical (S_full - S_complement) / f."""
        if self.internal_fraction == 0:
            return None
        return (self.s_full.s - self.s_complement.s) / self.internal_fraction


def full_ensemble_shift(records, quad=(0, 1, 0, 1), alpha_expected: float = 0.0) -> ShiftReport:
    """Split the run into doubly-internal records and the rest and compare.

    Per setting cell the full-ensemble correlation is exactly the count-weighted
    mean of the two parts; the largest deviation from that identity is reported.
    """
    t = RecordTable.coerce(records)
    s_full = chsh(t, quad)
    s_comp = chsh(t, quad, COMPLEMENT)
    try:
        s_int = chsh(t, quad, INTERNAL_BOTH)
    except InsufficientData:
        s_int = None
    try:
        s_ext = chsh(t, quad, EXTERNAL)
    except InsufficientData:
        s_ext = None
    inside = INTERNAL_BOTH.mask(t)
    k = int(inside.sum())
    f = k / len(t)

    err = 0.0
    a, a2, b, b2 = quad
    for i, j in [(a2, b2), (a2, b), (a, b2), (a, b)]:
        full = estimate_correlation(t, i, j)
        ins = estimate_correlation(t, i, j, INTERNAL_BOTH)
        out = estimate_correlation(t, i, j, COMPLEMENT)
        mix = sum(c.n * c.e_hat for c in (ins, out) if not c.empty) / full.n
        err = max(err, abs(full.e_hat - mix))

    pred = None if s_int is None else f * s_int.s + (1 - f) * s_comp.s
    return ShiftReport(s_full, s_int, s_comp, s_ext, f, k, len(t), alpha_expected, pred, err)


def significance_projection(sigma_now: float, t_now: float, t_target: float) -> float:
    """Significance grows as sqrt of the number of counts, i.e. of run time."""
    if t_now <= 0:
        raise ValueError("t_now must be positive")
    if sigma_now < 0:
        raise ValueError("sigma_now must be non-negative")
    return sigma_now * math.sqrt(t_target / t_now)


def retarded_histogram(records, condition: Condition = ALL) -> dict[tuple[int, int], int]:
    t = RecordTable.coerce(records)
    m = condition.mask(t)
    pairs, counts = np.unique(np.stack([t.retarded_a[m], t.retarded_b[m]], axis=1), axis=0, return_counts=True)
    return {(int(p[0]), int(p[1])): int(c) for p, c in zip(pairs, counts)}


def cell_tallies(records, condition: Condition = ALL) -> dict[str, dict[str, int]]:
    """Counts of agreeing/disagreeing outcomes per actual setting pair."""
    t = RecordTable.coerce(records)
    m = condition.mask(t)
    out: dict[str, dict[str, int]] = {}
    for i in np.unique(t.setting_a[m]):
        for j in np.unique(t.setting_b[m]):
            c = m & (t.setting_a == i) & (t.setting_b == j)
            agree = int(np.count_nonzero(c & (t.outcome_a == t.outcome_b)))
            n = int(c.sum())
            if n:
                out[f"{int(i)},{int(j)}"] = {"n": n, "agree": agree, "disagree": n - agree}
    return out
