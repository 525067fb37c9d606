"""Single double-bus microring resonator: couplers, 2x2 transfer matrix,
and the effective transmission/reflection picture valid on resonance."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import DomainError, PoleError

TWO_PI = 2.0 * math.pi

# Canonical on-resonance round trip. Reduces to theta = 0 in storage but
# fixes the default phase partition at phi = pi, which makes the composed
# network real entrywise and lets it match the resonant closed form.
RESONANT_THETA = TWO_PI

_RECIPROCITY_TOL = 1e-12


@dataclass(frozen=True)
class RingCoupler:
    """Physical parameters of one double-bus ring.

    tau and eta are the real direct transmission amplitudes of the lower
    and upper couplers; kappa and gamma are the matching cross-coupling
    amplitudes. theta is the round-trip phase (stored reduced mod 2*pi)
    and phi the phase partition between the two half-trips.
    """

    tau: float
    eta: float
    theta: float
    phi: float
    kappa: complex
    gamma: complex

    def __post_init__(self):
        for name, value in (("tau", self.tau), ("eta", self.eta)):
            if not -1.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [-1, 1], got {value}")
        if abs(self.tau * self.eta) >= 1.0:
            raise PoleError(
                f"|tau*eta| = {abs(self.tau * self.eta)} puts the resonance "
                "denominator at zero"
            )
        for t, k, label in ((self.tau, self.kappa, "kappa"),
                            (self.eta, self.gamma, "gamma")):
            if abs(abs(k) ** 2 + t * t - 1.0) > _RECIPROCITY_TOL:
                raise DomainError(f"|{label}|^2 + transmission^2 != 1")
            if abs(k * t + k.conjugate() * t) > _RECIPROCITY_TOL:
                raise DomainError(f"{label} violates the reciprocity phase condition")

    def flipped(self) -> "RingCoupler":
        """Same ring mounted mirror-imaged: the two buses trade roles."""
        return replace(self, tau=self.eta, eta=self.tau,
                       kappa=self.gamma, gamma=self.kappa)


@dataclass(frozen=True)
class RingTransfer:
    """Entries of the 2x2 bus-to-bus transfer matrix [[a, b], [c, d]]."""

    a: complex
    b: complex
    c: complex
    d: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)


class EffectiveCoupling(NamedTuple):
    """On-resonance beam-splitter equivalent of a ring: t^2 + r^2 = 1."""

    t: float
    r: float


def build_coupler(tau: float, eta: float, theta: float,
                  phi: float | None = None) -> RingCoupler:
    """Construct a ring from real coupler transmissions and a round-trip phase.

    Cross couplings are fixed by reciprocity to kappa = i*sqrt(1 - tau^2)
    and gamma = i*sqrt(1 - eta^2). When phi is omitted it defaults to half
    the given (unreduced) round trip; theta itself is stored mod 2*pi.

    Raises
    ------
    DomainError
        If tau or eta falls outside [-1, 1].
    PoleError
        If |tau * eta| = 1, which collapses the resonance denominator.
    """
    if not -1.0 <= tau <= 1.0:
        raise DomainError(f"tau must lie in [-1, 1], got {tau}")
    if not -1.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [-1, 1], got {eta}")
    if abs(tau * eta) >= 1.0:
        raise PoleError(f"|tau*eta| = {abs(tau * eta)}: on-resonance pole")
    if phi is None:
        phi = 0.5 * theta
    return RingCoupler(
        tau=float(tau),
        eta=float(eta),
        theta=float(theta) % TWO_PI,
        phi=float(phi),
        kappa=1j * math.sqrt(1.0 - tau * tau),
        gamma=1j * math.sqrt(1.0 - eta * eta),
    )


def transfer_matrix(coupler: RingCoupler) -> RingTransfer:
    """Bus-to-bus transfer matrix of one ring.

    The through amplitudes interpolate between the coupler transmissions
    with the round-trip phasor; the cross amplitudes share the ring loss
    factor and split the round trip according to the phase partition.
    """
    tau, eta, theta, phi = coupler.tau, coupler.eta, coupler.theta, coupler.phi
    z = cmath.exp(-1j * theta)
    den = 1.0 - eta * tau * z
    cross = coupler.gamma * coupler.kappa.conjugate()
    a = (eta - tau * z) / den
    b = -cross * cmath.exp(-1j * phi) / den
    c = -coupler.kappa * coupler.gamma.conjugate() * cmath.exp(-1j * (theta - phi)) / den
    d = (tau - eta * z) / den
    return RingTransfer(a=a, b=b, c=c, d=d)


def effective_coupling(tau: float, eta: float) -> EffectiveCoupling:
    """Collapse an on-resonance ring to its equivalent beam splitter.

    Raises
    ------
    PoleError
        If tau * eta = 1.
    DomainError
        If either transmission falls outside [-1, 1].
    """
    if not -1.0 <= tau <= 1.0 or not -1.0 <= eta <= 1.0:
        raise DomainError("transmissions must lie in [-1, 1]")
    den = 1.0 - eta * tau
    if abs(den) < 1e-15:
        raise PoleError("tau * eta = 1: effective coupling undefined")
    t = (eta - tau) / den
    r = math.sqrt(max((1.0 - tau * tau) * (1.0 - eta * eta), 0.0)) / den
    return EffectiveCoupling(t=t, r=r)


def invert_effective(t: float, tau: float) -> float:
    """Upper transmission eta that realizes effective transmission t given tau.

    Inverse of ``effective_coupling`` in its first argument:
    eta = (t + tau) / (1 + t*tau).

    Raises
    ------
    PoleError
        If t * tau = -1.
    DomainError
        If |t| > 1 or |tau| > 1.
    """
    if not -1.0 <= t <= 1.0 or not -1.0 <= tau <= 1.0:
        raise DomainError("arguments must lie in [-1, 1]")
    den = 1.0 + t * tau
    if abs(den) < 1e-15:
        raise PoleError("t * tau = -1: inversion undefined")
    return (t + tau) / den


def on_resonance_transfer(t: float, slot: int) -> RingTransfer:
    """Resonant transfer matrix expressed through the effective transmission.

    Slots 1 and 3 give [[t, r], [r, -t]]; slot 2 is the mirror-mounted ring
    and gives [[-t, r], [r, t]], with r = sqrt(1 - t^2).
    """
    if slot not in (1, 2, 3):
        raise DomainError(f"slot must be 1, 2 or 3, got {slot}")
    if not -1.0 <= t <= 1.0:
        raise DomainError(f"|t| <= 1 required, got {t}")
    r = math.sqrt(1.0 - t * t)
    if slot == 2:
        return RingTransfer(a=-t, b=r, c=r, d=t)
    return RingTransfer(a=t, b=r, c=r, d=-t)
