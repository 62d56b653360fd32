"""Training-length optimization.

Longer training improves the channel estimate (raising the per-stream SINR
through ``c0``) but shortens the data phase; the ergodic-rate objective
``R(tp)`` trades the two and is unimodal over the feasible range
``nt <= tp <= t - 1``.  Two optimizers are provided:

* :func:`optimize_tp_exact` scans every feasible integer ``tp`` against the
  closed-form ergodic rate — the reference answer at any block length.
* :func:`optimize_tp_asymptotic` optimizes the deterministic-equivalent
  rate instead.  It too scans exhaustively by default; only for very long
  blocks (``t >= 10_000``), where a full scan is wasteful, does it switch
  to a ternary search that exploits unimodality, finishing with a small
  exhaustive window so the returned integer is exact.

Both tie-break toward the smallest training length, so results are unique
and replays are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .analytic import rate_closed_form
from .config import Receiver, SystemConfig
from .largescale import det_rate

__all__ = ["TpSearchResult", "optimize_tp_exact", "optimize_tp_asymptotic"]

_TERNARY_MIN_T = 10_000
_TERNARY_WINDOW = 24


@dataclass(frozen=True)
class TpSearchResult:
    """Outcome of a training-length search.

    Attributes:
        tp_star: optimal training length (smallest maximizer on ties).
        rate_at_star: objective value at ``tp_star``.
        trace: every evaluated ``(tp, rate)`` pair, sorted by ``tp`` —
            the full feasible range for the exhaustive method, the probed
            subset for the ternary method.
        method: ``"exhaustive"`` or ``"concave-bisection"``.
    """

    tp_star: int
    rate_at_star: float
    trace: tuple[tuple[int, float], ...]
    method: str

    def __post_init__(self) -> None:
        if self.method not in ("exhaustive", "concave-bisection"):
            raise ValueError(f"unknown search method: {self.method!r}")
        if not self.trace:
            raise ValueError("empty search trace")
        best = max(r for _, r in self.trace)
        if not self.rate_at_star == best:
            raise ValueError("rate_at_star must equal the best traced rate")
        first_best = min(tp for tp, r in self.trace if r == best)
        if self.tp_star != first_best:
            raise ValueError("tp_star must be the smallest maximizer in the trace")


def _search(
    cfg: SystemConfig, objective: Callable[[int], float], method: str, use_ternary: bool
) -> TpSearchResult:
    lo, hi = cfg.nt, cfg.t - 1
    cache: dict[int, float] = {}

    def f(tp: int) -> float:
        if tp not in cache:
            cache[tp] = objective(tp)
        return cache[tp]

    if use_ternary:
        # Narrow the bracket by unimodality, then settle the final window
        # exhaustively so plateaus and float ties cannot mislead the search.
        a, b = lo, hi
        while b - a > _TERNARY_WINDOW:
            m1 = a + (b - a) // 3
            m2 = b - (b - a) // 3
            if f(m1) < f(m2):
                a = m1 + 1
            else:
                b = m2
        for tp in range(a, b + 1):
            f(tp)
    else:
        for tp in range(lo, hi + 1):
            f(tp)

    trace = tuple(sorted(cache.items()))
    best = max(r for _, r in trace)
    tp_star = min(tp for tp, r in trace if r == best)
    return TpSearchResult(tp_star=tp_star, rate_at_star=best, trace=trace, method=method)


def optimize_tp_exact(cfg: SystemConfig, receiver: Receiver) -> TpSearchResult:
    """Maximize the closed-form ergodic rate over all feasible training
    lengths by exhaustive scan (``cfg.tp`` only seeds the feasible range)."""
    return _search(
        cfg,
        lambda tp: rate_closed_form(receiver, cfg.with_tp(tp)),
        method="exhaustive",
        use_ternary=False,
    )


def optimize_tp_asymptotic(cfg: SystemConfig, receiver: Receiver) -> TpSearchResult:
    """Maximize the deterministic-equivalent rate over feasible training
    lengths.

    Exhaustive below ``t = 10_000``; beyond that a ternary search over the
    unimodal objective plus an exhaustive final window, which returns the
    same integer as a full scan at a fraction of the evaluations.
    """
    use_ternary = cfg.t >= _TERNARY_MIN_T
    return _search(
        cfg,
        lambda tp: det_rate(receiver, cfg.with_tp(tp)),
        method="concave-bisection" if use_ternary else "exhaustive",
        use_ternary=use_ternary,
    )
