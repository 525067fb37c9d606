"""Success constraints of the heralded phase gate and the parameter
manifolds on which the network attains its optimal operating point."""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError, UndefinedPhaseError
from .network import NetworkParams, compose_scattering, closed_form_resonant
from .ring import (RESONANT_THETA, TWO_PI, RingCoupler, build_coupler,
                   invert_effective, transfer_matrix)

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)

# Fixed through amplitude demanded of the network's first diagonal entry.
S11_FIXED = 1.0 - SQRT2

# Optimal effective transmissions of the outer and middle rings.
T1_OPTIMAL = math.sqrt(2.0 * (SQRT2 - 1.0))
T2_OPTIMAL = (1.0 + 2.0 * SQRT2) / 7.0

# Largest t1^2 for which the companion outer transmission stays real.
_T1_SQ_LIMIT = 12.0 * SQRT2 - 16.0


def wrap_angle(x: float) -> float:
    """Map an angle to (-pi, pi]."""
    w = -((-x + math.pi) % TWO_PI - math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class OptimalPoint:
    """Effective transmissions of the fully optimal resonant network."""

    t1: float
    t2: float
    t3: float


def optimal_point() -> OptimalPoint:
    return OptimalPoint(t1=T1_OPTIMAL, t2=T2_OPTIMAL, t3=T1_OPTIMAL)


@dataclass(frozen=True)
class NlpsgVerdict:
    """Success-constraint diagnostics of one scattering matrix.

    The three beta candidates must coincide for the heralded gate to act
    uniformly on every photon-number component; ``residual`` is their
    largest pairwise distance. Off resonance the candidates pick up a
    common phase, so magnitude-based residuals are reported alongside the
    complex ones.
    """

    beta0: complex
    beta1: complex
    beta2: complex
    residual: float
    s11_residual: float
    success_probability: float
    magnitude_residual: float
    s11_magnitude_residual: float
    offdiag_probability: float

    def satisfied(self, tol: float = 1e-9) -> bool:
        """Strict (complex) success criterion."""
        return self.residual < tol and self.s11_residual < tol

    def magnitudes_satisfied(self, tol: float = 1e-9) -> bool:
        """Phase-blind criterion appropriate for detuned networks."""
        return self.magnitude_residual < tol and self.s11_magnitude_residual < tol


def verdict(s: np.ndarray) -> NlpsgVerdict:
    """Evaluate the success constraints on a 3x3 scattering matrix."""
    s = np.asarray(s, dtype=complex)
    if s.shape != (3, 3):
        raise DomainError(f"expected a 3x3 matrix, got shape {s.shape}")
    pair = s[0, 0] * s[1, 1] + s[1, 0] * s[0, 1]
    beta0 = complex(s[1, 1])
    beta1 = complex(pair)
    beta2 = complex(-s[0, 0] * (pair + s[1, 0] * s[0, 1]))
    residual = max(abs(beta0 - beta1), abs(beta0 - beta2), abs(beta1 - beta2))
    half = 0.5
    return NlpsgVerdict(
        beta0=beta0,
        beta1=beta1,
        beta2=beta2,
        residual=float(residual),
        s11_residual=float(abs(s[0, 0] - S11_FIXED)),
        success_probability=float(abs(beta0) ** 2),
        magnitude_residual=float(max(abs(abs(beta0) - half),
                                     abs(abs(beta1) - half),
                                     abs(abs(beta2) - half))),
        s11_magnitude_residual=float(abs(abs(s[0, 0]) - (SQRT2 - 1.0))),
        offdiag_probability=float(0.5 * abs(s[1, 0]) ** 2 * abs(s[0, 1]) ** 2),
    )


def t3_of_t1(t1: float) -> float:
    """Companion outer transmission keeping the resonant network optimal.

    Satisfies (1 - t1^2) * (1 - t3^2) = 3 - 2*sqrt(2).

    Raises
    ------
    DomainError
        If t1^2 exceeds 12*sqrt(2) - 16 or |t1| >= 1.
    """
    u = t1 * t1
    if u >= 1.0:
        raise DomainError(f"|t1| must be < 1, got {t1}")
    radicand = (_T1_SQ_LIMIT - u) / (1.0 - u)
    if radicand < 0.0:
        raise DomainError(
            f"t1^2 = {u} exceeds the optimal-curve limit {_T1_SQ_LIMIT}")
    return math.sqrt(radicand)


def beta_sq_of_t1(t1: float, formula: str = "corrected") -> float:
    """Success probability along the optimal t3(t1) relationship.

    ``corrected`` (default) matches the scattering-matrix computation and
    peaks at 1/4. ``printed`` is a legacy normalization smaller by exactly
    the factor 1 + sqrt(2); it is retained for cross-checking and peaks at
    (sqrt(2) - 1)/4.
    """
    if formula not in ("printed", "corrected"):
        raise DomainError(f"formula must be 'printed' or 'corrected', got {formula!r}")
    u = t1 * t1
    if u >= 1.0:
        raise DomainError(f"|t1| must be < 1, got {t1}")
    if u > _T1_SQ_LIMIT:
        raise DomainError(
            f"t1^2 = {u} exceeds the optimal-curve limit {_T1_SQ_LIMIT}")
    value = (1.0 + SQRT2) * u * (_T1_SQ_LIMIT - u) / (16.0 * (1.0 - u))
    if formula == "corrected":
        value *= 1.0 + SQRT2
    return value


def _central_derivative(f, x: float, h: float = 1e-4) -> float:
    """Richardson-extrapolated central difference."""
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0


def optimize_t1(formula: str = "corrected") -> tuple[float, float]:
    """Numerically maximize beta_sq_of_t1 without using the closed form.

    Golden-section search brackets the peak; bisection on the numerical
    derivative then refines the location to ~1e-12.
    """
    lo, hi = 1e-6, math.sqrt(_T1_SQ_LIMIT) - 1e-12
    f = lambda t: beta_sq_of_t1(t, formula)

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(60):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)

    # The derivative changes sign across the peak; bisect on it.
    a = max(lo, a - 1e-4)
    b = min(hi, b + 1e-4)
    ga = _central_derivative(f, a)
    gb = _central_derivative(f, b)
    if ga > 0.0 > gb:
        for _ in range(80):
            mid = 0.5 * (a + b)
            gm = _central_derivative(f, mid)
            if gm > 0.0:
                a = mid
            else:
                b = mid
    t1_star = 0.5 * (a + b)
    return t1_star, f(t1_star)


def t2_from_equality(t1: float, t3: float) -> float:
    """Middle transmission equating the zero- and one-photon heralded
    amplitudes of the resonant network, found by bisection."""
    def gap(t2: float) -> float:
        v = verdict(closed_form_resonant(t1, t2, t3))
        return (v.beta0 - v.beta1).real

    a, b = 1e-6, 1.0 - 1e-9
    ga, gb = gap(a), gap(b)
    if ga * gb > 0.0:
        raise DomainError("heralded-amplitude equality does not bracket in (0, 1)")
    for _ in range(200):
        mid = 0.5 * (a + b)
        if gap(mid) * ga > 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


@dataclass(frozen=True)
class SampleResiduals:
    """Numerical health record attached to a manifold sample."""

    constraint: float
    beta_sq_dev: float
    ring_phases: tuple[float, float, float]
    solver_mag: float = 0.0
    solver_arg: float = 0.0


@dataclass(frozen=True)
class ManifoldSample:
    """One point on an optimal-operation manifold, embedded in a full
    three-ring network so it can be composed and simulated directly."""

    network: NetworkParams
    ring_index: int
    residuals: SampleResiduals


def _slot_transmission(slot: int) -> float:
    return T2_OPTIMAL if slot == 2 else T1_OPTIMAL


def curve_ring(slot: int, tau: float, transmission: float | None = None) -> RingCoupler:
    """Resonant ring on the slot's optimal one-parameter curve."""
    t = _slot_transmission(slot) if transmission is None else transmission
    return build_coupler(tau, invert_effective(t, tau), RESONANT_THETA)


def curve_network(tau1: float = 0.0, tau2: float = 0.0, tau3: float = 0.0,
                  deltas: tuple[float, float, float] = (0.0, 0.0, 0.0)) -> NetworkParams:
    """Fully resonant optimal network with free lower-coupler draws."""
    return NetworkParams(
        rings=(curve_ring(1, tau1), curve_ring(2, tau2), curve_ring(3, tau3)),
        deltas=deltas,
    )


def ring_phase_arg(eta: float, tau: float, theta: float) -> float:
    """Phase of the ring's through amplitude (eta - tau e^{-i theta}) /
    (1 - eta tau e^{-i theta}).

    Raises
    ------
    UndefinedPhaseError
        If the through amplitude vanishes (eta = tau on resonance).
    PoleError
        If |eta * tau| >= 1.
    """
    if abs(eta * tau) >= 1.0:
        raise PoleError(f"|eta*tau| = {abs(eta * tau)} >= 1")
    z = cmath.exp(-1j * theta)
    a = (eta - tau * z) / (1.0 - eta * tau * z)
    if abs(a) < 1e-14:
        raise UndefinedPhaseError(
            "through amplitude vanishes; its phase is undefined")
    return math.atan2(a.imag, a.real)


def surface_theta(transmission: float, eta: float, tau: float) -> tuple[float, ...]:
    """Round-trip phases at which the ring's through magnitude equals the
    target transmission.

    Returns the pair {+theta, -theta mod 2*pi} when a solution exists, a
    single angle when the branches coincide, and an empty tuple when the
    magnitude is unreachable. Cosines within 1e-12 beyond the unit
    interval are clamped (rounding at manifold edges). When eta*tau = 0
    the magnitude is phase-independent, so a match returns the
    representatives (0, pi) and a mismatch returns nothing.

    Raises
    ------
    DomainError
        If |transmission| >= 1 or either coupler amplitude is outside (-1, 1).
    """
    if not abs(transmission) < 1.0:
        raise DomainError(f"|transmission| < 1 required, got {transmission}")
    if not (abs(eta) < 1.0 and abs(tau) < 1.0):
        raise DomainError("eta and tau must lie in (-1, 1)")
    t_sq = transmission * transmission
    if eta * tau == 0.0:
        reachable = (eta * eta + tau * tau) / (1.0 + eta * eta * tau * tau)
        if abs(reachable - t_sq) <= 1e-10:
            return (0.0, math.pi)
        return ()
    cos_theta = (eta * eta + tau * tau - t_sq - t_sq * eta * eta * tau * tau) \
        / (2.0 * eta * tau * (1.0 - t_sq))
    if abs(cos_theta) > 1.0 + 1e-12:
        return ()
    cos_theta = min(1.0, max(-1.0, cos_theta))
    theta = math.acos(cos_theta)
    if theta == 0.0 or theta == math.pi:
        return (theta,)
    return (theta, TWO_PI - theta)


def compensated_network(ring1: RingCoupler, ring2: RingCoupler,
                        ring3: RingCoupler,
                        deltas13: tuple[float, float] = (0.0, 0.0)) -> NetworkParams:
    """Assemble the network with the middle line phase that cancels the
    internal loop phase.

    The three blocks enclose one feedback loop (outer rings' cross legs
    plus the middle ring's through leg). Detuned rings give those legs
    nonzero phases; setting the middle in-line phase to their sum makes
    the loop constructive again, which is what restores the heralded
    amplitude to magnitude 1/2 on the detuned manifolds.
    """
    m1 = transfer_matrix(ring1)
    m2 = transfer_matrix(ring2.flipped())
    m3 = transfer_matrix(ring3)
    delta2 = (np.angle(m1.c) + np.angle(m2.d) + np.angle(m3.b)) % TWO_PI
    return NetworkParams(rings=(ring1, ring2, ring3),
                         deltas=(deltas13[0], float(delta2), deltas13[1]))


def _sample_from_network(net: NetworkParams, ring_index: int,
                         solver_mag: float = 0.0,
                         solver_arg: float = 0.0) -> ManifoldSample:
    v = verdict(compose_scattering(net))
    phases = []
    for c in net.rings:
        try:
            phases.append(ring_phase_arg(c.eta, c.tau, c.theta))
        except UndefinedPhaseError:
            phases.append(0.0)
    return ManifoldSample(
        network=net,
        ring_index=ring_index,
        residuals=SampleResiduals(
            constraint=v.residual,
            beta_sq_dev=abs(v.success_probability - 0.25),
            ring_phases=tuple(phases),
            solver_mag=solver_mag,
            solver_arg=solver_arg,
        ),
    )


def curve_eta_of_tau(transmission: float, tau_grid,
                     ring: int = 1) -> list[ManifoldSample]:
    """Trace the resonant one-parameter curve of one ring slot.

    Each grid point fixes the slot's lower coupler and solves the upper
    one so the effective transmission stays at the target; the other two
    slots sit at their canonical optimal points. Grid points at the
    inversion pole are skipped and logged.
    """
    if ring not in (1, 2, 3):
        raise DomainError(f"ring must be 1, 2 or 3, got {ring}")
    samples = []
    skipped = 0
    for tau in tau_grid:
        try:
            swept = build_coupler(float(tau),
                                  invert_effective(transmission, float(tau)),
                                  RESONANT_THETA)
        except (PoleError, DomainError) as err:
            skipped += 1
            log.info("curve point tau=%s skipped: %s", tau, err)
            continue
        rings = [curve_ring(s, 0.0) for s in (1, 2, 3)]
        rings[ring - 1] = swept
        net = NetworkParams(rings=tuple(rings))
        samples.append(_sample_from_network(net, ring))
    if skipped:
        log.info("curve trace skipped %d of %d grid points", skipped,
                 skipped + len(samples))
    return samples


def surface_network(ring1: RingCoupler, ring3: RingCoupler,
                    tau2: float = 0.0) -> NetworkParams:
    """Embed detuned outer rings over a resonant middle-curve ring, with
    the loop-phase-cancelling middle line phase."""
    return compensated_network(ring1, curve_ring(2, tau2), ring3)


@dataclass(frozen=True)
class OffResonanceReport:
    """Detuned-network health: constraint verdict plus the heralded phase
    measured against the summed ring through-phases."""

    sample: ManifoldSample
    verdict: NlpsgVerdict
    heralded_phase: float
    phase_residual: float


def off_resonance_check(ring1: RingCoupler, ring3: RingCoupler,
                        tau2: float = 0.0) -> OffResonanceReport:
    """Verify optimal operation of a network with detuned outer rings.

    The outer rings may sit anywhere on their equal-magnitude surfaces;
    the middle ring stays on its resonant curve. The heralded amplitude
    keeps magnitude 1/2 and its phase equals the sum of the rings'
    through phases (the resonant middle ring contributes zero).
    """
    net = surface_network(ring1, ring3, tau2)
    sample = _sample_from_network(net, 0)
    v = verdict(compose_scattering(net))
    heralded = math.atan2(v.beta0.imag, v.beta0.real)
    predicted = sum(sample.residuals.ring_phases)
    return OffResonanceReport(
        sample=sample,
        verdict=v,
        heralded_phase=heralded,
        phase_residual=abs(wrap_angle(heralded - predicted)),
    )


def _through_amplitude_jacobian(eta: float, tau: float, theta: float):
    """A, dA/deta, dA/dtheta of the through amplitude."""
    z = cmath.exp(-1j * theta)
    den = 1.0 - eta * tau * z
    a = (eta - tau * z) / den
    da_deta = (1.0 - tau * tau * z * z) / (den * den)
    da_dtheta = 1j * tau * z * (1.0 - eta * eta) / (den * den)
    return a, da_deta, da_dtheta


def intersect_delta2(delta2: float, tau2_grid=None,
                     transmission: float = T2_OPTIMAL,
                     max_iter: int = 50, tol: float = 1e-12) -> list[ManifoldSample]:
    """Middle-ring parameters compatible with a fixed middle line phase.

    For each lower-coupler value, damped Newton solves the two conditions
    |A(eta2, tau2, theta2)| = transmission and arg A = delta2 for
    (eta2, theta2), seeded by continuation from the previous converged
    point. With the line phase set to delta2 the solved ring cancels the
    internal loop phase, so every converged sample composes to a network
    with heralded amplitude 1/2. Non-converged grid points are skipped
    and counted, never fabricated. delta2 = 0 degenerates to the
    resonant curve.
    """
    if tau2_grid is None:
        tau2_grid = np.linspace(0.0, 0.999, 401)
    target_arg = wrap_angle(delta2)
    samples = []
    skipped = 0
    seed = None
    for tau2 in np.asarray(tau2_grid, dtype=float):
        if seed is None:
            try:
                eta = invert_effective(transmission, tau2)
            except (PoleError, DomainError):
                skipped += 1
                continue
            theta = wrap_angle(target_arg)
        else:
            eta, theta = seed
        converged = False
        for _ in range(max_iter):
            a, da_deta, da_dtheta = _through_amplitude_jacobian(eta, tau2, theta)
            mag = abs(a)
            if mag < 1e-14:
                break
            f = np.array([mag - transmission,
                          wrap_angle(math.atan2(a.imag, a.real) - target_arg)])
            if max(abs(f[0]), abs(f[1])) < tol:
                converged = True
                break
            ac = a.conjugate()
            jac = np.array([
                [(ac * da_deta).real / mag, (ac * da_dtheta).real / mag],
                [(ac * da_deta).imag / mag ** 2, (ac * da_dtheta).imag / mag ** 2],
            ])
            try:
                step = np.linalg.solve(jac, -f)
            except np.linalg.LinAlgError:
                break
            scale = 1.0
            base = max(abs(f[0]), abs(f[1]))
            for _ in range(10):
                new_eta = min(1.0 - 1e-12, max(1e-12, eta + scale * step[0]))
                new_theta = wrap_angle(theta + scale * step[1])
                a_new, _, _ = _through_amplitude_jacobian(new_eta, tau2, new_theta)
                if abs(a_new) < 1e-14:
                    scale *= 0.5
                    continue
                f_new = max(abs(abs(a_new) - transmission),
                            abs(wrap_angle(math.atan2(a_new.imag, a_new.real)
                                           - target_arg)))
                if f_new < base:
                    break
                scale *= 0.5
            eta, theta = new_eta, new_theta
        if not converged:
            skipped += 1
            log.debug("intersect point tau2=%s did not converge", tau2)
            seed = None
            continue
        seed = (eta, theta)
        ring2 = build_coupler(tau2, eta, theta)
        net = NetworkParams(
            rings=(curve_ring(1, 0.0), ring2, curve_ring(3, 0.0)),
            deltas=(0.0, float(delta2), 0.0),
        )
        samples.append(_sample_from_network(
            net, 2, solver_mag=abs(f[0]), solver_arg=abs(f[1])))
    if skipped:
        log.info("intersection trace skipped %d of %d grid points",
                 skipped, skipped + len(samples))
    return samples


def align_line_phases(params: NetworkParams,
                      grid: int = 720) -> tuple[NetworkParams, NlpsgVerdict]:
    """Scan the outer line phases for the setting that makes the three
    heralded amplitudes complex-equal, and report the re-composed verdict.

    Only the sum of the two outer phases matters: it rotates the one- and
    two-photon amplitudes once and twice respectively while leaving the
    zero-photon one fixed. The scan reports the best setting without
    asserting any closed-form compensation law.
    """
    v = verdict(compose_scattering(params))

    def residual_at(sigma: float) -> float:
        rot = cmath.exp(-1j * sigma)
        b1 = v.beta1 * rot
        b2 = v.beta2 * rot * rot
        return max(abs(v.beta0 - b1), abs(v.beta0 - b2), abs(b1 - b2))

    sigmas = np.linspace(0.0, TWO_PI, grid, endpoint=False)
    best = min(sigmas, key=residual_at)
    width = TWO_PI / grid
    a, b = best - width, best + width
    for _ in range(80):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if residual_at(m1) < residual_at(m2):
            b = m2
        else:
            a = m1
    sigma = 0.5 * (a + b)
    aligned = NetworkParams(
        rings=params.rings,
        deltas=(params.deltas[0] + sigma, params.deltas[1], params.deltas[2]),
    )
    return aligned, verdict(compose_scattering(aligned))
