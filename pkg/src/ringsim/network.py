"""Compose three ring blocks into the global 3x3 scattering matrix.

Each block is a 3x3 transfer matrix that maps a mixed vector of true
inputs and internal lines; the mode-swap algebra exchanges dependent and
independent variables until the product becomes input -> output."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PoleError, SingularPivotError
from .ring import RingCoupler, RingTransfer, transfer_matrix

SWAP_PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class NetworkParams:
    """Three rings (slots 1..3) plus the in-line waveguide phases."""

    rings: tuple[RingCoupler, RingCoupler, RingCoupler]
    deltas: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "rings", tuple(self.rings))
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        if len(self.rings) != 3:
            raise DomainError(f"exactly 3 rings required, got {len(self.rings)}")
        if len(self.deltas) != 3:
            raise DomainError(f"exactly 3 line phases required, got {len(self.deltas)}")
        for r in self.rings:
            if not isinstance(r, RingCoupler):
                raise DomainError("rings must be RingCoupler instances")


def mode_swap3(g: np.ndarray, j: int, pivot_tol: float = SWAP_PIVOT_TOL) -> np.ndarray:
    """Exchange the roles of input j and output j of a 3x3 linear relation.

    Given y = G x, returns G' such that y' = G' x' where x' carries y_j in
    slot j and x_j moves to the output side. Entries are ratios of 2x2
    minors to the pivot g_jj; the operation is an involution.

    Parameters
    ----------
    g : (3, 3) complex array
    j : int
        1-based mode index to swap.
    pivot_tol : float
        Minimum |g_jj| for the exchange to be well posed.

    Raises
    ------
    SingularPivotError
        If |g_jj| <= pivot_tol.
    """
    g = np.asarray(g, dtype=complex)
    if g.shape != (3, 3):
        raise DomainError(f"expected a 3x3 matrix, got shape {g.shape}")
    if j not in (1, 2, 3):
        raise DomainError(f"mode index must be 1, 2 or 3, got {j}")
    p = j - 1
    pivot = g[p, p]
    if abs(pivot) <= pivot_tol:
        raise SingularPivotError(
            f"mode-{j} pivot magnitude {abs(pivot):.3e} below {pivot_tol:.1e}",
            mode=j, pivot=pivot,
        )
    out = np.empty_like(g)
    for i in range(3):
        for k in range(3):
            if i == p and k == p:
                out[i, k] = 1.0
            elif i == p:
                out[i, k] = -g[p, k]
            elif k == p:
                out[i, k] = g[i, p]
            else:
                out[i, k] = g[i, k] * pivot - g[i, p] * g[p, k]
    return out / pivot


def block_transfer(block: int, m: RingTransfer, delta: float) -> np.ndarray:
    """Embed one ring transfer into its 3x3 network block.

    Blocks 1 and 3 put the in-line phase e^{-i delta} on the first slot and
    the ring on slots 2..3; block 2 puts the ring on slots 1..2 and the
    phase on slot 3.
    """
    if block not in (1, 2, 3):
        raise DomainError(f"block must be 1, 2 or 3, got {block}")
    phase = np.exp(-1j * delta)
    out = np.zeros((3, 3), dtype=complex)
    if block == 2:
        out[0:2, 0:2] = m.matrix
        out[2, 2] = phase
    else:
        out[0, 0] = phase
        out[1:3, 1:3] = m.matrix
    return out


def compose_scattering(params: NetworkParams) -> np.ndarray:
    """Global 3x3 scattering matrix of the three-ring network.

    The middle ring is mounted mirror-imaged, so its transfer matrix is
    built from the flipped coupler. Each block is swapped on mode 2 to
    expose its internal line, the chain is multiplied in slot order 3,2,1,
    and a final mode-2 swap returns an input -> output map.

    Raises
    ------
    SingularPivotError
        If any block's through amplitude (or the chain's mode-2 pivot)
        vanishes; the error carries the offending block when applicable.
    """
    couplers = (params.rings[0], params.rings[1].flipped(), params.rings[2])
    swapped = []
    for slot, coupler in zip((1, 2, 3), couplers):
        t3 = block_transfer(slot, transfer_matrix(coupler), params.deltas[slot - 1])
        try:
            swapped.append(mode_swap3(t3, 2))
        except SingularPivotError as err:
            raise SingularPivotError(
                f"block {slot}: {err}", mode=err.mode, pivot=err.pivot, block=slot
            ) from err
    return mode_swap3(swapped[2] @ swapped[1] @ swapped[0], 2)


def closed_form_resonant(t1: float, t2: float, t3: float) -> np.ndarray:
    """Scattering matrix of the fully resonant network in closed form.

    Valid when every ring sits on resonance with zero line phases; the
    matrix depends only on the effective transmissions. det = -1.

    Raises
    ------
    DomainError
        If any |t_i| > 1.
    PoleError
        If t2 * sqrt(1 - t1^2) * sqrt(1 - t3^2) = 1.
    """
    for name, t in (("t1", t1), ("t2", t2), ("t3", t3)):
        if not -1.0 <= t <= 1.0:
            raise DomainError(f"{name} must lie in [-1, 1], got {t}")
    c1 = math.sqrt(1.0 - t1 * t1)
    c2 = math.sqrt(1.0 - t2 * t2)
    c3 = math.sqrt(1.0 - t3 * t3)
    den = t2 * c1 * c3 - 1.0
    if abs(den) < 1e-15:
        raise PoleError("t2 * sqrt(1-t1^2) * sqrt(1-t3^2) = 1: network is singular")
    s = np.array([
        [t2 - c1 * c3, -t3 * c2, t1 * c2 * c3],
        [-t1 * c2, -t1 * t2 * t3, t2 * c3 - c1],
        [t3 * c1 * c2, t2 * c1 - c3, -t1 * t3],
    ], dtype=complex)
    return s / den


def unitarity_residual(s: np.ndarray) -> float:
    """Max-norm deviation of S†S from the identity."""
    s = np.asarray(s, dtype=complex)
    eye = np.eye(s.shape[0])
    return float(np.max(np.abs(s.conj().T @ s - eye)))
