"""Pauli channels, parametric channel families, entropy and hashing points.

A Pauli channel is the probability 4-vector (p_I, p_X, p_Y, p_Z).  The
one-parameter families used throughout:

  depolarizing   (1-3p, p, p, p)
  independent_xz ((1-p)^2, p(1-p), p^2, p(1-p))
  two_pauli      (1-2p, p, 0, p)
  custom         (1-p, cX*p, cY*p, cZ*p)   with cX+cY+cZ = 1

All entropies are in bits (log base 2): thresholds and hashing points are
defined by the channel entropy crossing 1 bit per qubit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SUM_TOL = 1e-12
_COEFF_SUM_TOL = 1e-9
_COEFF_FLOOR = 0.0001

FAMILY_KINDS = ("depolarizing", "independent_xz", "two_pauli", "custom")


@dataclass(frozen=True)
class PauliChannel:
    """Probability 4-vector of a mixed Pauli channel."""

    p_i: float
    p_x: float
    p_y: float
    p_z: float

    def __post_init__(self):
        probs = (self.p_i, self.p_x, self.p_y, self.p_z)
        if any(p < -1e-15 for p in probs):
            raise ValueError(f"negative channel probability in {probs}")
        if abs(sum(probs) - 1.0) > _SUM_TOL:
            raise ValueError(f"channel probabilities sum to {sum(probs)!r}, not 1")

    def as_array(self) -> np.ndarray:
        """(p_I, p_X, p_Y, p_Z) as a float64 array."""
        return np.array([self.p_i, self.p_x, self.p_y, self.p_z])

    def swap_xz(self) -> "PauliChannel":
        """Channel conjugated by Hadamard on every qubit (X <-> Z)."""
        return PauliChannel(self.p_i, self.p_z, self.p_y, self.p_x)


@dataclass(frozen=True)
class ChannelFamily:
    """One-parameter Pauli channel family.

    ``coefficients`` is only used for kind == "custom" and must sum to 1
    within 1e-9 (the printed precision of published optimization results);
    out-of-tolerance triples are rejected rather than silently fixed.
    Use ``custom_family(..., renormalize=True)`` for rounded inputs.
    """

    kind: str
    coefficients: tuple[float, float, float] | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown channel family {self.kind!r}")
        if self.kind == "custom":
            c = self.coefficients
            if c is None or len(c) != 3:
                raise ValueError("custom family needs three coefficients")
            if abs(sum(c) - 1.0) > _COEFF_SUM_TOL:
                raise ValueError(f"custom coefficients sum to {sum(c)!r}, not 1")
            if any(ci < _COEFF_FLOOR - 1e-12 or ci > 1.0 for ci in c):
                raise ValueError(f"custom coefficients outside [{_COEFF_FLOOR}, 1]: {c}")

    def p_max(self) -> float:
        """Upper end of the usable parameter range."""
        if self.kind == "depolarizing":
            return 1.0 / 3.0
        if self.kind in ("independent_xz", "two_pauli"):
            return 0.5
        return 1.0

    def spec(self) -> str:
        """Canonical CLI specifier string."""
        if self.kind == "depolarizing":
            return "depol"
        if self.kind == "independent_xz":
            return "indxz"
        if self.kind == "two_pauli":
            return "twopauli"
        cx, cy, cz = self.coefficients
        return f"custom:{cx:.10g},{cy:.10g},{cz:.10g}"


def custom_family(c_x: float, c_y: float, c_z: float, renormalize: bool = False) -> ChannelFamily:
    """Build a custom family; ``renormalize`` rescales a rounded triple exactly."""
    if renormalize:
        s = c_x + c_y + c_z
        if not 0.999 < s < 1.001:
            raise ValueError(f"coefficients too far from normalized: sum={s}")
        c_x, c_y, c_z = c_x / s, c_y / s, c_z / s
    return ChannelFamily("custom", (c_x, c_y, c_z))


def parse_channel_spec(text: str) -> ChannelFamily:
    """Parse a CLI channel specifier: depol | indxz | twopauli | custom:cX,cY,cZ.

    Custom coefficients are renormalized when their sum is within 1e-6 of 1,
    so triples printed at 8 decimals round-trip.
    """
    t = text.strip()
    if t == "depol":
        return ChannelFamily("depolarizing")
    if t == "indxz":
        return ChannelFamily("independent_xz")
    if t == "twopauli":
        return ChannelFamily("two_pauli")
    if t.startswith("custom:"):
        parts = t[len("custom:"):].split(",")
        if len(parts) != 3:
            raise ValueError(f"custom spec needs three coefficients: {text!r}")
        try:
            c = [float(p) for p in parts]
        except ValueError:
            raise ValueError(f"bad coefficient in channel spec {text!r}") from None
        if abs(sum(c) - 1.0) > 1e-6:
            raise ValueError(f"custom coefficients sum to {sum(c)}, not 1")
        return custom_family(*c, renormalize=True)
    raise ValueError(f"unknown channel spec {text!r}")


def family_eval(family: ChannelFamily, p: float) -> PauliChannel:
    """Channel of the family at noise parameter p."""
    if not 0.0 <= p <= family.p_max() + 1e-15:
        raise ValueError(f"p={p} outside [0, {family.p_max()}] for {family.kind}")
    if family.kind == "depolarizing":
        return PauliChannel(1.0 - 3.0 * p, p, p, p)
    if family.kind == "independent_xz":
        q = 1.0 - p
        return PauliChannel(q * q, p * q, p * p, p * q)
    if family.kind == "two_pauli":
        return PauliChannel(1.0 - 2.0 * p, p, 0.0, p)
    cx, cy, cz = family.coefficients
    return PauliChannel(1.0 - p, cx * p, cy * p, cz * p)


def entropy_bits(probs) -> float:
    """Shannon entropy in bits with the 0*log0 = 0 convention."""
    h = 0.0
    for p in probs:
        if p > 0.0:
            h -= p * math.log2(p)
    return h


def channel_entropy(ch: PauliChannel) -> float:
    """Entropy of the error distribution, in bits."""
    return entropy_bits((ch.p_i, ch.p_x, ch.p_y, ch.p_z))


def _family_entropy(family: ChannelFamily, p: float) -> float:
    return channel_entropy(family_eval(family, p))


def hashing_point(family: ChannelFamily, tol: float = 1e-12,
                  bracket: tuple[float, float] | None = None) -> float:
    """Smallest p with channel entropy exactly 1 bit, by bracketed bisection.

    The entropy rises from 0 at p = 0; for strongly biased custom families
    it can peak below the end of the range and fall back under 1, so the
    bracket is located by a forward scan for the first sign change.
    """
    if bracket is None:
        a, b = 0.0, family.p_max()
    else:
        a, b = bracket
    if _family_entropy(family, a) >= 1.0:
        raise ValueError("entropy already >= 1 at lower bracket end")
    # locate the first upcrossing on a coarse grid
    steps = 256
    lo = a
    hi = None
    for i in range(1, steps + 1):
        p = a + (b - a) * i / steps
        if _family_entropy(family, p) >= 1.0:
            hi = p
            break
        lo = p
    if hi is None:
        raise ValueError("channel entropy never reaches 1 on the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _family_entropy(family, mid) >= 1.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
