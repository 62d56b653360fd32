"""Monte Carlo link simulator: the independent oracle for every closed form.

Simulates the full training + data-transmission chain — pilot transmission
with multiplicative transmit distortion, LMMSE channel estimation, and the
three linear receivers (ZF / MRC / MMSE) — and reduces the per-stream SINR
draws to empirical NMSE, outage, and ergodic-rate figures.

Reproducibility contract
------------------------
All randomness flows through counter-based Philox streams keyed by
``(seed, stream_id)``.  Trials are partitioned into fixed batches of 4096;
batch ``j`` of a run owns the stream ``(seed, stream_id + j)``.  Within a
batch, draws happen in a fixed order — per internal chunk (a deterministic
function of the array sizes): channel ``H``, pilot distortion, pilot noise —
so identical ``(cfg, receiver, trials, seed)`` reproduce bit-identical
sample sets, independent of how batches would be scheduled across workers.
Changing the draw order or the batch/chunk partition is a breaking change
to this contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DerivedParams, Receiver, SystemConfig, derive_params

__all__ = [
    "BATCH_TRIALS",
    "RandomStream",
    "SinrSampleSet",
    "gen_pilot_matrix",
    "simulate_training",
    "lmmse_estimate",
    "sample_sinr",
    "sample_sinr_model",
    "sample_sinr_multi",
    "validate_sinr_end_to_end",
    "empirical_nmse",
    "empirical_rate",
    "empirical_outage",
]

BATCH_TRIALS = 4096

# Cap on complex elements per (trials, nr, tp) scratch array; batches whose
# arrays would exceed it are processed in equal-order sub-chunks so that big
# antenna/pilot counts don't blow up resident memory.
_CHUNK_ELEMENTS = 1 << 24


@dataclass(frozen=True)
class RandomStream:
    """Keyed handle on a deterministic, splittable random sequence.

    Identical ``(seed, stream_id)`` always reproduce identical draws;
    distinct stream ids give statistically independent Philox sequences.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=[self.seed, self.stream_id]))

    def shifted(self, offset: int) -> "RandomStream":
        """The stream ``offset`` slots after this one (used per batch)."""
        return RandomStream(self.seed, self.stream_id + offset)


@dataclass(frozen=True)
class SinrSampleSet:
    """Per-stream SINR draws for one receiver under one configuration.

    ``samples`` is a flat float64 array of length ``nt * trials``, ordered
    trial-major (all streams of trial 0, then trial 1, ...).  When
    ``delta > 0`` every sample lies strictly below the SINR wall
    ``1/delta^2``.
    """

    receiver: Receiver
    samples: np.ndarray
    cfg: SystemConfig
    trials: int
    seed: int


def _cn(g: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """I.i.d. standard circularly-symmetric complex Gaussians."""
    z = g.standard_normal(size=shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)


def gen_pilot_matrix(nt: int, tp: int) -> np.ndarray:
    """Training matrix with exactly orthogonal rows: ``Sp Sp^H = tp I_nt``.

    Rows are the first ``nt`` rows of the ``tp``-point DFT matrix (unit
    modulus entries, so every pilot symbol carries equal energy and each row
    has energy ``tp``).  The phase index is reduced mod ``tp`` in integer
    arithmetic, which keeps the orthogonality exact to rounding rather than
    accumulating argument error for large ``m * n``.

    Args:
        nt: number of transmit antennas (rows), >= 1.
        tp: training length in channel uses (columns), >= nt.
    """
    if tp < nt:
        raise ValueError(f"infeasible pilot length: need tp >= nt, got tp={tp} < nt={nt}")
    m = np.arange(nt)[:, None]
    n = np.arange(tp)[None, :]
    return np.exp((-2j * np.pi / tp) * ((m * n) % tp))


def _training_draws(
    cfg: SystemConfig, g: np.random.Generator, n: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw ``n`` trials of (H, pilot distortion, pilot noise), fixed order."""
    h = _cn(g, (n, cfg.nr, cfg.nt))
    dp = cfg.delta * _cn(g, (n, cfg.nt, cfg.tp))
    vp = _cn(g, (n, cfg.nr, cfg.tp))
    return h, dp, vp


def _chunk_sizes(cfg: SystemConfig, n: int) -> list[int]:
    """Deterministic sub-chunk partition of a batch (memory guard)."""
    per_trial = max(cfg.nr, cfg.nt) * cfg.tp
    chunk = min(BATCH_TRIALS, max(1, _CHUNK_ELEMENTS // max(1, per_trial)))
    return [min(chunk, n - s) for s in range(0, n, chunk)]


def simulate_training(
    cfg: SystemConfig, rs: RandomStream
) -> tuple[np.ndarray, np.ndarray]:
    """One trial of the training phase: true channel and received pilots.

    Returns ``(H, Yp)`` with ``H`` of shape (nr, nt) i.i.d. CN(0,1) and
    ``Yp = sqrt(rho/nt) H (Sp + Dp) + Vp`` of shape (nr, tp), where the
    distortion ``Dp`` is i.i.d. CN(0, delta^2) and ``Vp`` i.i.d. CN(0,1).
    """
    g = rs.generator()
    h, dp, vp = _training_draws(cfg, g, 1)
    sp = gen_pilot_matrix(cfg.nt, cfg.tp)
    amp = math.sqrt(cfg.rho / cfg.nt)
    yp = amp * h[0] @ (sp + dp[0]) + vp[0]
    return h[0], yp


def lmmse_estimate(yp: np.ndarray, sp: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """LMMSE channel estimate from received pilots.

    ``Hhat = sqrt(rho/nt) Yp ((rho/nt) Sp^H Sp + (delta^2 rho + 1) I)^{-1} Sp^H``.
    Accepts a single (nr, tp) block or a batch (..., nr, tp); the tp x tp
    system is Hermitian with eigenvalues >= delta^2 rho + 1 >= 1, so it is
    never ill-conditioned.

    Args:
        yp: received pilot block(s), shape (..., nr, tp).
        sp: training matrix, shape (nt, tp).
        cfg: system configuration the pilots were generated under.
    """
    nt, tp = sp.shape
    if yp.shape[-1] != tp:
        raise ValueError(f"pilot-length mismatch: yp has {yp.shape[-1]} uses, sp has {tp}")
    scale = cfg.rho / nt
    a = scale * (sp.conj().T @ sp) + (cfg.delta**2 * cfg.rho + 1.0) * np.eye(tp)
    # One tp x tp solve shared by every trial in the batch.
    filt = np.linalg.solve(a, sp.conj().T)
    return math.sqrt(scale) * (yp @ filt)


def _gram_sinr(
    gram: np.ndarray, receiver: Receiver, dp: DerivedParams, delta: float
) -> np.ndarray:
    """Per-stream SINR from the Gram matrix ``G = Hbar^H Hbar``, batched.

    Args:
        gram: (n, nt, nt) Hermitian batch.
        receiver: which linear receiver's SINR map to apply.
        dp: derived parameters (for c0).
        delta: impairment level.

    Returns:
        (n, nt) real array of linear SINRs.
    """
    d2 = delta * delta
    nt = gram.shape[-1]
    if receiver is Receiver.ZF:
        ginv = np.linalg.inv(gram)
        diag = np.einsum("...kk->...k", ginv).real
        return 1.0 / (d2 + dp.c0 * diag)
    if receiver is Receiver.MRC:
        diag = np.einsum("...kk->...k", gram).real
        rowsq = np.abs(gram) ** 2
        srow = rowsq.sum(axis=-1)
        interf = srow - diag**2  # sum_{i != k} |G_ki|^2 ; G_kk is real
        return diag**2 / (interf + d2 * srow + dp.c0 * diag)
    if receiver is Receiver.MMSE:
        eye = np.eye(nt)
        q = np.linalg.inv(eye + ((1.0 + d2) / dp.c0) * gram)
        qd = np.einsum("...kk->...k", q).real
        return (1.0 - qd) / (d2 + qd)
    raise ValueError(f"unknown receiver: {receiver!r}")


def _estimate_batches(cfg: SystemConfig, trials: int, rs: RandomStream):
    """Yield batched channel estimates ``(H, Hhat)`` over the fixed batch
    partition of ``trials``; the workhorse behind all empirical reducers."""
    sp = gen_pilot_matrix(cfg.nt, cfg.tp)
    amp = math.sqrt(cfg.rho / cfg.nt)
    done = 0
    batch = 0
    while done < trials:
        n = min(BATCH_TRIALS, trials - done)
        g = rs.shifted(batch).generator()
        for m in _chunk_sizes(cfg, n):
            h, dp_, vp = _training_draws(cfg, g, m)
            yp = amp * (h @ (sp + dp_)) + vp
            yield h, lmmse_estimate(yp, sp, cfg)
        done += n
        batch += 1


def _require_zf_ok(cfg: SystemConfig, receivers) -> None:
    if Receiver.ZF in receivers and cfg.nr < cfg.nt:
        raise ValueError(
            f"ZF needs at least as many receive as transmit antennas, got nr={cfg.nr} < nt={cfg.nt}"
        )


def sample_sinr_multi(
    cfg: SystemConfig, receivers: tuple[Receiver, ...], trials: int, rs: RandomStream
) -> dict[Receiver, SinrSampleSet]:
    """SINR samples for several receivers over the *same* channel draws.

    One simulation pass (training, estimation, Gram matrix), then each
    receiver's SINR map applied to the shared Gram batch, so sample k of one
    receiver and sample k of another describe the same channel realization
    and stream.  See :class:`SinrSampleSet` for the sample layout.
    """
    if trials < 1:
        raise ValueError(f"need trials >= 1, got {trials}")
    receivers = tuple(dict.fromkeys(receivers))
    _require_zf_ok(cfg, receivers)
    dpar = derive_params(cfg)
    sigma_est = math.sqrt(dpar.sigma2_est)
    parts: dict[Receiver, list[np.ndarray]] = {r: [] for r in receivers}
    for _, hhat in _estimate_batches(cfg, trials, rs):
        hbar = hhat / sigma_est
        gram = hbar.conj().swapaxes(-1, -2) @ hbar
        for r in receivers:
            parts[r].append(_gram_sinr(gram, r, dpar, cfg.delta).ravel())
    return {
        r: SinrSampleSet(
            receiver=r,
            samples=np.concatenate(parts[r]),
            cfg=cfg,
            trials=trials,
            seed=rs.seed,
        )
        for r in receivers
    }


def sample_sinr(
    cfg: SystemConfig, receiver: Receiver, trials: int, rs: RandomStream
) -> SinrSampleSet:
    """Per-stream SINR draws for one receiver; ``nt * trials`` samples.

    Each trial draws a fresh channel, runs the training phase, estimates the
    channel, and evaluates the receiver's exact SINR expression for every
    spatial stream.  ZF requires ``nr >= nt``.
    """
    return sample_sinr_multi(cfg, (receiver,), trials, rs)[receiver]


def sample_sinr_model(
    cfg: SystemConfig, receivers: tuple[Receiver, ...], trials: int, rs: RandomStream
) -> dict[Receiver, SinrSampleSet]:
    """SINR draws under the idealized estimate model, not the full chain.

    Draws the variance-normalized channel estimate directly as an i.i.d.
    standard complex Gaussian matrix — the distributional model the SINR
    closed forms describe exactly — and applies the same per-receiver SINR
    maps as :func:`sample_sinr_multi`.  The full training chain produces a
    normalized estimate that is *approximately* Gaussian (the pilot
    distortion enters multiplied by the unknown channel); sampling the
    model directly separates that modelling gap from any numerical error
    in the closed forms, which is what makes this the control experiment
    for distribution-level comparisons.  Stream/batch layout and the
    sample ordering match :func:`sample_sinr_multi`.
    """
    if trials < 1:
        raise ValueError(f"need trials >= 1, got {trials}")
    receivers = tuple(dict.fromkeys(receivers))
    _require_zf_ok(cfg, receivers)
    dpar = derive_params(cfg)
    parts: dict[Receiver, list[np.ndarray]] = {r: [] for r in receivers}
    done = 0
    batch_index = 0
    while done < trials:
        n = min(BATCH_TRIALS, trials - done)
        g = rs.shifted(batch_index).generator()
        hbar = _cn(g, (n, cfg.nr, cfg.nt))
        gram = np.einsum("bij,bik->bjk", hbar.conj(), hbar)
        for r in receivers:
            parts[r].append(_gram_sinr(gram, r, dpar, cfg.delta))
        done += n
        batch_index += 1
    return {
        r: SinrSampleSet(
            receiver=r,
            samples=np.concatenate([p.ravel() for p in parts[r]]),
            cfg=cfg,
            trials=trials,
            seed=rs.seed,
        )
        for r in receivers
    }


def empirical_nmse(cfg: SystemConfig, trials: int, rs: RandomStream) -> float:
    """Monte Carlo estimate of the per-entry channel-estimation NMSE,
    ``mean ||H - Hhat||_F^2 / (nr nt)`` over ``trials`` channel draws."""
    if trials < 1:
        raise ValueError(f"need trials >= 1, got {trials}")
    total = 0.0
    count = 0
    for h, hhat in _estimate_batches(cfg, trials, rs):
        err = h - hhat
        total += float(np.sum(err.real**2 + err.imag**2))
        count += err.shape[0]
    return total / (count * cfg.nr * cfg.nt)


def empirical_rate(
    cfg: SystemConfig, receiver: Receiver, trials: int, rs: RandomStream
) -> float:
    """Monte Carlo ergodic achievable rate in bits per channel use:
    ``(td/t) * nt * mean(log2(1 + sinr))`` over per-stream samples."""
    s = sample_sinr(cfg, receiver, trials, rs)
    return (cfg.td / cfg.t) * cfg.nt * float(np.mean(np.log2(1.0 + s.samples)))


def empirical_outage(samples: SinrSampleSet, threshold: float) -> float:
    """Fraction of SINR samples at or below ``threshold`` (empirical CDF)."""
    if threshold < 0:
        raise ValueError(f"need threshold >= 0, got {threshold}")
    return float(np.mean(samples.samples <= threshold))


def validate_sinr_end_to_end(
    cfg: SystemConfig, receiver: Receiver, trials: int, rs: RandomStream
) -> float:
    """Cross-check the Gram-matrix SINR forms against first principles.

    Per trial and stream, builds the receiver's weight vector explicitly
    (ZF: pseudo-inverse column; MRC: estimated channel column; MMSE: solve
    against the effective-noise covariance), evaluates
    ``sinr = (rho/nt) |a^H hhat_k|^2 / (a^H R_z a)`` with the conditional
    covariance ``R_z`` of the interference-plus-distortion-plus-noise term,
    and returns the maximum relative deviation from the Gram-matrix values.
    """
    if trials < 1:
        raise ValueError(f"need trials >= 1, got {trials}")
    _require_zf_ok(cfg, (receiver,))
    dpar = derive_params(cfg)
    sigma_est = math.sqrt(dpar.sigma2_est)
    scale = cfg.rho / cfg.nt
    noise_var = (cfg.rho + cfg.rho * cfg.delta**2 + 1.0 + dpar.epsilon) / (
        1.0 + dpar.epsilon
    )
    eye = np.eye(cfg.nr)
    worst = 0.0
    for _, hhat in _estimate_batches(cfg, trials, rs):
        hbar = hhat / sigma_est
        gram = hbar.conj().swapaxes(-1, -2) @ hbar
        reference = _gram_sinr(gram, receiver, dpar, cfg.delta)
        outer = hhat @ hhat.conj().swapaxes(-1, -2)
        r_base = scale * (1.0 + cfg.delta**2) * outer + noise_var * eye
        for k in range(cfg.nt):
            hk = hhat[:, :, k]
            r_z = r_base - scale * (hk[:, :, None] @ hk.conj()[:, None, :])
            if receiver is Receiver.ZF:
                pinv = np.linalg.solve(
                    hhat.conj().swapaxes(-1, -2) @ hhat, hhat.conj().swapaxes(-1, -2)
                )
                a = pinv[:, k, :].conj()
            elif receiver is Receiver.MRC:
                a = hk
            else:
                a = np.linalg.solve(r_z, hk[:, :, None])[:, :, 0]
            num = scale * np.abs(np.einsum("ni,ni->n", a.conj(), hk)) ** 2
            den = np.einsum("ni,nij,nj->n", a.conj(), r_z, a).real
            sinr = num / den
            dev = np.abs(sinr - reference[:, k]) / reference[:, k]
            worst = max(worst, float(dev.max()))
    return worst
