"""Entropy estimator for n x m concatenated repetition codes at large m.

Writing each stabilizer-coset probability of the concatenation in terms of
the per-block sums a = h^b_k + h^b_{n-k},

    P_S = (1/2) * prod_i a_i * (1 + prod_i q_i),   q = (h_k - h_{n-k}) / a
    P_N =        prod_i a_i * (1 + prod_i r_i),    r = a(1-b) / a(b)

the coset entropies reduce to expectations of -ln(1 + prod q) and
-ln(1 + prod r) over m independent per-block draws, and the m * E[-ln a]
terms cancel in S_RB:

    S_RB (bits) = 1 + (E[-ln(1 + prod q)] - E[-ln(1 + prod r)]) / ln 2.

Each expectation is computed from the distribution of (sign, sum of logs):
per-block atoms (sign q, ln |q|) are binned on a uniform log grid with
linear mass splitting (second-order accurate), the m-fold convolution
power is taken through one FFT (transform, pointwise m-th power, inverse),
and the expectation of -ln(1 +- e^x) is evaluated on the result with
log1p-stable branches.  Signs multiply over the two-element group, handled
by convolving the total and signed masses separately.  Exact point masses:
q = 0 atoms short-circuit the product (zero channel); |ln q| below the
truncation floor contributes less than exp(floor) and is folded into the
zero channel as well.

The bin width alpha comes from a geometric ladder: the finest scale whose
grid fits the bin budget is used, and the result is flagged unstable when
that forces a scale coarser than the stability cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len, irfft, rfft

from .channels import PauliChannel
from .rep import block_table

ALPHA_0 = 1e-4
ALPHA_MIN = 1e-9
ALPHA_LADDER_STEPS = 40
BIN_BUDGET = 1 << 24
ALPHA_STABLE_MAX = 2e-4
LOG_FLOOR = -46.0  # |q| below e^-46 contributes < 1e-20 to either entropy


@dataclass(frozen=True)
class QRTable:
    """Per-(k, b) convolution inputs of one inner block."""

    n: int
    q: np.ndarray        # (2, n+1), signed, zero where h sums vanish
    r: np.ndarray        # (2, n+1)
    ln_h_sum: np.ndarray  # (2, n+1), ln(h^b_k + h^b_{n-k})
    weight: np.ndarray   # (2, n+1), sums to 1


def qr_coefficients(n: int, ch: PauliChannel, inner_type: str = "X") -> QRTable:
    """q, r, log h-sums and block weights from the closed-form block table."""
    if inner_type == "Z":
        ch = ch.swap_xz()
    bt = block_table(n, "X", ch)
    h = bt.h
    hk = h
    hnk = h[:, ::-1]
    a = hk + hnk
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(a > 0.0, (hk - hnk) / np.where(a > 0.0, a, 1.0), 0.0)
        r = np.where(a > 0.0, (hk[::-1] + hnk[::-1]) / np.where(a > 0.0, a, 1.0), 0.0)
        ln_h_sum = np.where(a > 0.0, np.log(np.where(a > 0.0, a, 1.0)), -np.inf)
    comb = np.array([math.comb(n, k) for k in range(n + 1)], dtype=float)
    weight = h * comb
    total = weight.sum()
    if not 0.0 < total < np.inf:
        raise ValueError("degenerate block table")
    weight = weight / total
    return QRTable(n, q, r, ln_h_sum, weight)


@dataclass(frozen=True)
class SignedLogDistribution:
    """Binned mass over (sign, alpha * integer log-magnitude) plus a point
    mass for exactly-zero magnitudes."""

    alpha: float
    offset: int          # grid value of bin j is alpha * (offset + j)
    pos: np.ndarray
    neg: np.ndarray
    zero_mass: float

    def total_mass(self) -> float:
        return float(self.pos.sum() + self.neg.sum()) + self.zero_mass

    def check_invariants(self, tol: float = 1e-9) -> None:
        if abs(self.total_mass() - 1.0) > tol:
            raise AssertionError(f"signed-log mass {self.total_mass()!r} != 1")


def bin_atoms(log_values: np.ndarray, weights: np.ndarray, signs: np.ndarray,
              alpha: float, zero_mass: float = 0.0) -> SignedLogDistribution:
    """Linear-split binning of weighted atoms onto the alpha grid.

    Splitting each atom between its two neighbouring grid points preserves
    the first moment exactly and makes the binning error second order in
    alpha for smooth integrands.
    """
    if log_values.size == 0:
        return SignedLogDistribution(alpha, 0, np.zeros(1), np.zeros(1), zero_mass)
    scaled = log_values / alpha
    lo = np.floor(scaled).astype(np.int64)
    frac = scaled - lo
    offset = int(lo.min())
    length = int(lo.max()) - offset + 2
    pos = np.zeros(length)
    neg = np.zeros(length)
    for target, sign in ((pos, 1), (neg, -1)):
        sel = signs == sign
        if not sel.any():
            continue
        np.add.at(target, lo[sel] - offset, weights[sel] * (1.0 - frac[sel]))
        np.add.at(target, lo[sel] - offset + 1, weights[sel] * frac[sel])
    return SignedLogDistribution(alpha, offset, pos, neg, zero_mass)


def _fft_power(mass: np.ndarray, m: int, out_len: int, nfft: int) -> np.ndarray:
    spectrum = rfft(mass, nfft)
    out = irfft(spectrum ** m, nfft)[:out_len]
    np.clip(out, 0.0, None, out=out)
    return out


def convolve_power(dist: SignedLogDistribution, m: int,
                   scales=None) -> SignedLogDistribution:
    """Distribution of (product of signs, sum of log magnitudes) over m draws."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return dist
    nonzero = float(dist.pos.sum() + dist.neg.sum())
    zero_out = 1.0 - nonzero ** m
    length = dist.pos.shape[0]
    out_len = (length - 1) * m + 1
    nfft = next_fast_len(out_len)
    u = _fft_power(dist.pos + dist.neg, m, out_len, nfft)
    if dist.neg.any():
        v_in = dist.pos - dist.neg
        spectrum = rfft(v_in, nfft)
        v = irfft(spectrum ** m, nfft)[:out_len]
        pos = 0.5 * (u + v)
        neg = 0.5 * (u - v)
        np.clip(pos, 0.0, None, out=pos)
        np.clip(neg, 0.0, None, out=neg)
    else:
        pos, neg = u, np.zeros_like(u)
    return SignedLogDistribution(dist.alpha, dist.offset * m, pos, neg, zero_out)


def expect_neg_log1p_signed(dist: SignedLogDistribution) -> float:
    """E[-ln(1 + sign * e^x)] over the binned distribution.

    The zero channel contributes -ln(1 + 0) = 0.  Negative-sign mass in the
    x -> 0 bins would blow up; any such mass beyond numerical dust is a
    stability problem reported by the caller.
    """
    x = dist.alpha * (dist.offset + np.arange(dist.pos.shape[0]))
    pos_term = np.where(x > 0.0, -(x + np.log1p(np.exp(-np.clip(x, 0.0, None)))),
                        -np.log1p(np.exp(np.clip(x, None, 0.0))))
    total = float(dist.pos @ pos_term)
    if dist.neg.any():
        with np.errstate(divide="ignore", invalid="ignore"):
            em = -np.expm1(x)  # 1 - e^x
            neg_term = np.where(em > 0.0, -np.log(np.where(em > 0.0, em, 1.0)), 0.0)
        total += float(dist.neg @ neg_term)
    return total


def _sign_averaged_phi(x: np.ndarray) -> np.ndarray:
    """E over the product's sign of -ln(1 + sign * e^x), at log-magnitude x.

    Magnitude atoms come in opposite-sign pairs whose + member carries
    weight proportional to (1 + |q|)/2, so conditioned on the magnitudes
    the product is positive with probability (1 + e^x)/2.  Averaging the
    sign analytically replaces the -ln(1 - e^x) singularity with the
    bounded integrand -((1+Q)ln(1+Q) + (1-Q)ln(1-Q))/2, Q = e^x.
    """
    q = np.exp(np.clip(x, None, 0.0))
    one_minus = -np.expm1(np.clip(x, None, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (1.0 + q) * np.log1p(q)
        t2 = np.where(one_minus > 0.0,
                      one_minus * np.log(np.where(one_minus > 0.0, one_minus, 1.0)),
                      0.0)
    return -0.5 * (t1 + t2)


def expect_neg_log1p_paired(dist: SignedLogDistribution) -> float:
    """E[-ln(1 + prod q)] given only the magnitude masses of paired atoms."""
    x = dist.alpha * (dist.offset + np.arange(dist.pos.shape[0]))
    mass = dist.pos + dist.neg
    return float(mass @ _sign_averaged_phi(x))


def _pick_alpha(span: float, alpha0: float = ALPHA_0,
                budget: int = BIN_BUDGET) -> float:
    """Finest scale of the geometric ladder alpha0 * 2^j whose grid fits."""
    alpha = alpha0
    for _ in range(ALPHA_LADDER_STEPS):
        if span / alpha <= budget:
            return alpha
        alpha *= 2.0
    return alpha


def _resolve_smallest_atom(logs: np.ndarray, weights: np.ndarray,
                           alpha0: float) -> float:
    """Shrink alpha so the smallest significant log-magnitude spans >= 8 bins.

    Near x = 0 the sign-averaged integrand has curvature ~ 1/(2|x|); a
    heavy atom a fraction of one bin away from 0 would otherwise leave a
    first-order-in-alpha binning error.  Resolving it makes the error
    O(|x|) and self-limiting.
    """
    sig = (weights > 1e-9) & (logs < 0.0)
    if not sig.any():
        return alpha0
    x_min = float(-logs[sig].max())
    # refinement capped at 1024x: once alpha >> x_min the residual error is
    # O(x_min * ln(alpha / x_min)), already negligible
    return max(min(alpha0, x_min / 8.0), alpha0 / 1024.0, ALPHA_MIN)


@dataclass(frozen=True)
class LongRepEstimate:
    s_rb: float
    stable: bool
    alpha_q: float
    alpha_r: float


def s_rb_estimate_channel(n: int, m: int, ch: PauliChannel,
                          inner_type: str = "X",
                          alpha0: float = ALPHA_0,
                          bin_budget: int = BIN_BUDGET) -> LongRepEstimate:
    """Estimated S_RB (bits) of the n x m concatenated repetition code."""
    table = qr_coefficients(n, ch, inner_type=inner_type)
    w = table.weight.ravel()
    q = table.q.ravel()
    r = table.r.ravel()
    live = w > 0.0
    w, q, r = w[live], q[live], r[live]

    if m == 1:  # single block: both expectations are finite sums
        e_q = float(w @ -np.log1p(q))
        e_r = float(w @ -np.log1p(r))
        return LongRepEstimate(1.0 + (e_q - e_r) / math.log(2.0), True,
                               alpha0, alpha0)

    # q side: exact zeros and sub-floor magnitudes feed the zero channel.
    # Only magnitudes are convolved; the sign is integrated out analytically
    # (see _sign_averaged_phi), which removes the -ln(1 - e^x) singularity.
    absq = np.abs(q)
    tiny = absq <= math.exp(LOG_FLOOR)
    zero_mass = float(w[tiny].sum())
    wq, qv = w[~tiny], absq[~tiny]
    stable = True
    if wq.size:
        logs = np.log(qv)
        span_q = max(float(-logs.min()) * m, 1.0)
        alpha_fine = _resolve_smallest_atom(logs, wq, alpha0)
        alpha_q = _pick_alpha(span_q, alpha_fine, bin_budget)
        stable &= alpha_q <= max(ALPHA_STABLE_MAX, alpha_fine * 2.0)
        dist_q = bin_atoms(logs, wq, np.ones(wq.size, dtype=int), alpha_q, zero_mass)
        conv_q = convolve_power(dist_q, m)
        e_q = expect_neg_log1p_paired(conv_q)
    else:
        alpha_q = alpha0
        e_q = 0.0

    # r side: strictly positive ratios, no truncation of the upper tail
    logr = np.log(np.where(r > 0.0, r, 1.0))
    zero_r = r <= 0.0
    span_r = max((float(logr.max()) - float(logr.min())) * m, 1.0)
    alpha_r = _pick_alpha(span_r, alpha0, bin_budget)
    stable &= alpha_r <= ALPHA_STABLE_MAX
    dist_r = bin_atoms(logr[~zero_r], w[~zero_r], np.ones(int((~zero_r).sum()), dtype=int),
                       alpha_r, float(w[zero_r].sum()))
    conv_r = convolve_power(dist_r, m)
    e_r = expect_neg_log1p_signed(conv_r)

    s_rb = 1.0 + (e_q - e_r) / math.log(2.0)
    return LongRepEstimate(s_rb, stable, alpha_q, alpha_r)


def s_rb_estimate(n: int, m: int, family, p: float,
                  inner_type: str = "X",
                  alpha0: float = ALPHA_0,
                  bin_budget: int = BIN_BUDGET) -> LongRepEstimate:
    """Estimator entry point on a channel family at parameter p."""
    from .channels import family_eval
    return s_rb_estimate_channel(n, m, family_eval(family, p),
                                 inner_type=inner_type, alpha0=alpha0,
                                 bin_budget=bin_budget)
