"""Two-component Feshbach-Villars wavefunctions in momentum space."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grid import DECAY_TOL, PhaseSpaceGrid, check_decay, dft_plus, warn_if_not_decayed
from .kinematics import U_inverse, U_matrix, energy

__all__ = [
    "FV",
    "USUAL",
    "BoundaryDecayError",
    "RepresentationError",
    "FVState",
    "make_gaussian",
    "make_state",
    "superpose",
    "to_fv",
    "from_fv",
    "evolve_free",
]

FV = "FV"
USUAL = "usual"


class BoundaryDecayError(ValueError):
    """State is not representable on the grid (does not decay at an edge)."""


class RepresentationError(ValueError):
    """Operation received a state in the wrong representation."""


@dataclass(frozen=True, eq=False)
class FVState:
    """Momentum-space wavefunction ``(psi^+, psi^-)`` on ``grid.p``.

    The upper component is the particle (charge +1), the lower one the
    antiparticle.  Inner products with the indefinite metric weight the lower
    component by -1.
    """

    grid: PhaseSpaceGrid
    psi_plus: np.ndarray
    psi_minus: np.ndarray
    representation: str = FV

    def __post_init__(self):
        for name in ("psi_plus", "psi_minus"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != (self.grid.n,):
                raise ValueError(f"{name} must have shape ({self.grid.n},), got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} has non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.representation not in (FV, USUAL):
            raise RepresentationError(f"unknown representation {self.representation!r}")

    @property
    def components(self) -> np.ndarray:
        return np.stack([self.psi_plus, self.psi_minus])

    def charge_norm(self) -> float:
        dp = self.grid.dp
        return float((np.abs(self.psi_plus) ** 2 - np.abs(self.psi_minus) ** 2).sum() * dp)

    def norm(self) -> float:
        """Positive-definite norm ``sum(|psi+|^2 + |psi-|^2) dp``."""
        dp = self.grid.dp
        return float((np.abs(self.psi_plus) ** 2 + np.abs(self.psi_minus) ** 2).sum() * dp)

    def component_norms(self):
        dp = self.grid.dp
        return (
            float((np.abs(self.psi_plus) ** 2).sum() * dp),
            float((np.abs(self.psi_minus) ** 2).sum() * dp),
        )

    def is_single_charge(self) -> bool:
        return not (np.any(self.psi_plus) and np.any(self.psi_minus))

    @property
    def charge(self) -> int:
        """+1 / -1 for single-charge states, 0 for superpositions."""
        has_plus = bool(np.any(self.psi_plus))
        has_minus = bool(np.any(self.psi_minus))
        if has_plus and not has_minus:
            return 1
        if has_minus and not has_plus:
            return -1
        return 0

    def coordinate_wavefunction(self) -> np.ndarray:
        """``psi(q) = (2 pi hbar)^{-1/2} int psi(p) exp(i p q / hbar) dp``, shape ``(2, n)``."""
        g = self.grid
        return dft_plus(self.components, axis=-1) * g.dp * np.sqrt(g.n / (2 * np.pi * g.hbar))

    def boundary_decay(self):
        return check_decay(self.components, self.grid)


def make_state(grid, psi_plus, psi_minus, representation=FV, warn=True):
    state = FVState(grid, psi_plus, psi_minus, representation)
    if warn:
        warn_if_not_decayed(state.components, grid)
    return state


def make_gaussian(grid, sigma_p2=1.0, charge=1, p_center=0.0, q_center=0.0):
    """Gaussian momentum distribution with variance ``sigma_p2`` on one charge component.

    ``psi(p) = (2 pi s2)^{-1/4} exp(-(p - p0)^2 / (4 s2)) exp(-i q0 p / hbar)``.
    Raises :class:`BoundaryDecayError` when the packet is not representable.
    """
    if not np.isfinite(sigma_p2) or sigma_p2 <= 0:
        raise ValueError(f"sigma_p2 must be > 0, got {sigma_p2}")
    if charge not in (1, -1):
        raise ValueError(f"charge must be +1 or -1, got {charge}")
    p = grid.p
    amp = (2.0 * np.pi * sigma_p2) ** -0.25 * np.exp(-((p - p_center) ** 2) / (4.0 * sigma_p2))
    psi = amp * np.exp(-1j * q_center * p / grid.hbar)
    p_edge, q_edge = check_decay(psi, grid)
    if p_edge > DECAY_TOL:
        raise BoundaryDecayError(
            f"sigma_p2={sigma_p2} too large for p_max={grid.p_max}: |psi(p_edge)|={p_edge:.2e}"
        )
    if q_edge > DECAY_TOL:
        raise BoundaryDecayError(
            f"sigma_p2={sigma_p2} too small for the q-window (q_max={grid.q_max:.4g}): "
            f"|psi(q_edge)|/max={q_edge:.2e}"
        )
    zero = np.zeros_like(psi)
    if charge == 1:
        return FVState(grid, psi, zero)
    return FVState(grid, zero, psi)


def superpose(states, weights):
    """Coherent superposition normalized by the positive-definite norm."""
    grid = states[0].grid
    rep = states[0].representation
    plus = sum(w * s.psi_plus for s, w in zip(states, weights))
    minus = sum(w * s.psi_minus for s, w in zip(states, weights))
    out = FVState(grid, plus, minus, rep)
    scale = 1.0 / np.sqrt(out.norm())
    return FVState(grid, plus * scale, minus * scale, rep)


def _apply_matrix(mats, state, rep):
    comps = np.einsum("kab,bk->ak", mats, state.components)
    return replace(state, psi_plus=comps[0], psi_minus=comps[1], representation=rep)


def to_fv(state):
    if state.representation != USUAL:
        raise RepresentationError("to_fv expects a state in the usual representation")
    g = state.grid
    return _apply_matrix(U_matrix(g.p, g.mass, g.c), state, FV)


def from_fv(state):
    if state.representation != FV:
        raise RepresentationError("from_fv expects a state in the FV representation")
    g = state.grid
    return _apply_matrix(U_inverse(g.p, g.mass, g.c), state, USUAL)


def evolve_free(state, t):
    """Exact free propagation ``psi^+- -> exp(-+ i E t / hbar) psi^+-``."""
    if state.representation != FV:
        raise RepresentationError("evolve_free acts on FV-representation states")
    g = state.grid
    phase = np.exp(-1j * energy(g.p, g.mass, g.c) * t / g.hbar)
    return replace(state, psi_plus=state.psi_plus * phase, psi_minus=state.psi_minus * phase.conj())
