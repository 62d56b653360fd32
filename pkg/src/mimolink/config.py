"""System configuration and derived scalar quantities.

The model throughout this package is a training-based point-to-point MIMO
link in block fading: the channel stays constant over a coherence block of
``t`` channel uses, the first ``tp`` of which carry known pilots and the
remaining ``t - tp`` carry data.  The transmitter hardware is imperfect:
after all compensation, a residual additive distortion remains whose power
is ``delta**2`` times the signal power (``delta`` equals the EVM figure of
the transmitter; LTE-grade radios sit in the 0.08-0.175 range, which is
documented here but deliberately not enforced).

Everything downstream (estimator quality, SINR statistics, rate formulas,
large-system limits) is driven by a handful of scalars derived from the
configuration; :func:`derive_params` computes them all in one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "Receiver",
    "SystemConfig",
    "DerivedParams",
    "AccuracyError",
    "derive_params",
    "db_to_linear",
    "linear_to_db",
]


class AccuracyError(RuntimeError):
    """A numerical routine could not meet its accuracy target.

    Raised instead of silently returning a degraded value, e.g. when
    adaptive quadrature fails to converge within its refinement budget.
    """


class Receiver(str, Enum):
    """Linear receiver family selecting formula sets throughout the package."""

    ZF = "zf"
    MRC = "mrc"
    MMSE = "mmse"

    def __str__(self) -> str:  # so f-strings/CSV show "zf", not "Receiver.ZF"
        return self.value


def db_to_linear(snr_db: float) -> float:
    """Convert an SNR given in dB to linear scale."""
    return 10.0 ** (snr_db / 10.0)


def linear_to_db(snr: float) -> float:
    """Convert a linear SNR to dB."""
    if snr <= 0:
        raise ValueError(f"SNR must be positive, got {snr}")
    return 10.0 * math.log10(snr)


@dataclass(frozen=True)
class SystemConfig:
    """Full parameter tuple of the link.

    Attributes:
        nt: number of transmit antennas (>= 1).
        nr: number of receive antennas (>= 1).
        t: coherence block length in channel uses.
        tp: training length in channel uses; feasible range ``nt <= tp < t``.
        rho: average SNR per receive antenna, linear scale (> 0).
        delta: residual transmit-impairment level, equal to the transmitter
            EVM (>= 0; 0 means ideal hardware).
    """

    nt: int
    nr: int
    t: int
    tp: int
    rho: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.nt < 1 or self.nr < 1:
            raise ValueError(
                f"antenna counts must be >= 1, got nt={self.nt}, nr={self.nr}"
            )
        if not self.nt <= self.tp < self.t:
            raise ValueError(
                "training length must satisfy nt <= tp < t, got "
                f"nt={self.nt}, tp={self.tp}, t={self.t}"
            )
        if not self.rho > 0:
            raise ValueError(f"rho must be > 0 (linear SNR), got {self.rho}")
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")

    @property
    def td(self) -> int:
        """Data-phase length ``t - tp`` (always >= 1 for a valid config)."""
        return self.t - self.tp

    def with_tp(self, tp: int) -> "SystemConfig":
        """Copy of this config with a different training length."""
        return SystemConfig(
            nt=self.nt, nr=self.nr, t=self.t, tp=tp, rho=self.rho, delta=self.delta
        )

    def with_rho(self, rho: float) -> "SystemConfig":
        """Copy of this config with a different linear SNR."""
        return SystemConfig(
            nt=self.nt, nr=self.nr, t=self.t, tp=self.tp, rho=rho, delta=self.delta
        )


@dataclass(frozen=True)
class DerivedParams:
    """Scalar quantities derived from a :class:`SystemConfig`.

    Attributes:
        epsilon: estimation quality factor; grows with SNR and training
            length, saturates at ``tp / (nt * delta**2)`` under impairments.
        sigma2_err: per-entry variance of the channel estimation error
            (the NMSE), equal to ``1 / (1 + epsilon)``.
        sigma2_est: per-entry variance of the channel estimate,
            ``epsilon / (1 + epsilon)``; complements ``sigma2_err`` to 1.
        c0: noise-scaling factor entering every finite-dimension SINR
            expression; strictly decreasing in SNR.
        c0_bar: high-SNR limit of ``c0`` (finite only because of the
            impairments; 0 for ideal hardware).
        epsilon_bar: estimation quality factor in the large-system
            normalization (identical formula to ``epsilon``).
        c1: large-system counterpart of ``c0`` (equals ``c0 / nt``).
        beta: receive-to-transmit antenna ratio ``nr / nt``.
        d: auxiliary scalar of the large-system MMSE fixed point,
            ``c1 / (1 + delta**2) + 1 - beta``.
    """

    epsilon: float
    sigma2_err: float
    sigma2_est: float
    c0: float
    c0_bar: float
    epsilon_bar: float
    c1: float
    beta: float
    d: float


def derive_params(cfg: SystemConfig) -> DerivedParams:
    """Compute all derived scalars for a configuration.

    Pure function: identical inputs give bit-identical outputs.

    Args:
        cfg: validated system configuration.

    Returns:
        The full set of derived scalars.
    """
    nt, tp, rho, delta = cfg.nt, cfg.tp, cfg.rho, cfg.delta
    d2 = delta * delta

    epsilon = rho * tp / (nt * (rho * d2 + 1.0))
    sigma2_err = 1.0 / (1.0 + epsilon)
    sigma2_est = epsilon / (1.0 + epsilon)

    c0 = nt * (rho + rho * d2 + 1.0 + epsilon) / (rho * epsilon)
    c0_bar = d2 * (1.0 + d2) * nt * nt / tp

    # Large-system scalars use the same estimation-quality formula; keeping
    # a distinct field mirrors the two normalizations in the analysis.
    epsilon_bar = epsilon
    c1 = (rho + rho * d2 + 1.0 + epsilon_bar) / (rho * epsilon_bar)
    beta = cfg.nr / nt
    d = c1 / (1.0 + d2) + 1.0 - beta

    return DerivedParams(
        epsilon=epsilon,
        sigma2_err=sigma2_err,
        sigma2_est=sigma2_est,
        c0=c0,
        c0_bar=c0_bar,
        epsilon_bar=epsilon_bar,
        c1=c1,
        beta=beta,
        d=d,
    )
