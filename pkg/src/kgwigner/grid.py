"""Phase-space discretization and the unitary transforms between conjugate axes.

One momentum axis ``p`` and its conjugate coordinate axis ``q`` are sampled on
symmetric, equidistant grids::

    p_k = -p_max + k dp,      dp = 2 p_max / n
    q_j = (j - n/2) dq,       dq = 2 pi hbar / (n dp)

so that ``dp dq n = 2 pi hbar``.  The momentum-difference variable ``P`` that
appears in mixed ``(p, P)`` representations lives on ``P_m = (m - n/2) dp``,
i.e. the same index layout as ``q``.

The forward transform uses the kernel ``exp(-i P q / hbar)``::

    F_m = n^{-1/2} sum_j f_j exp(-i P_m q_j / hbar)

Because the ``P`` and ``q`` index layouts coincide the DFT matrix is symmetric,
which several modules exploit (a transform along ``P`` with the same kernel
sign is the same matrix).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridError",
    "PhaseSpaceGrid",
    "make_grid",
    "dft_minus",
    "dft_plus",
    "transform_q_to_P",
    "transform_P_to_q",
    "quadrature",
    "half_shift",
    "spectral_derivative",
    "check_decay",
    "DECAY_TOL",
]

DECAY_TOL = 1e-10


class GridError(ValueError):
    """Invalid grid parameters or mismatched field shapes."""


@dataclass(frozen=True)
class PhaseSpaceGrid:
    n: int
    p_max: float
    hbar: float = 1.0
    mass: float = 1.0
    c: float = 1.0
    e_charge: float = 1.0
    dim: int = field(default=1, init=False)

    @property
    def dp(self) -> float:
        return 2.0 * self.p_max / self.n

    @property
    def dq(self) -> float:
        return 2.0 * np.pi * self.hbar / (self.n * self.dp)

    @property
    def p(self) -> np.ndarray:
        return -self.p_max + self.dp * np.arange(self.n)

    @property
    def q(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dq

    @property
    def P(self) -> np.ndarray:
        """Momentum differences conjugate to ``q`` (same layout as ``q``)."""
        return (np.arange(self.n) - self.n // 2) * self.dp

    @property
    def m_index(self) -> np.ndarray:
        """Integer offsets ``m`` with ``P = m dp``."""
        return np.arange(self.n) - self.n // 2

    @property
    def q_max(self) -> float:
        return self.n * self.dq / 2.0

    @property
    def rest_energy(self) -> float:
        return self.mass * self.c**2

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p_max": self.p_max,
            "hbar": self.hbar,
            "mass": self.mass,
            "c": self.c,
        }

    def same_as(self, other: "PhaseSpaceGrid") -> bool:
        return (
            self.n == other.n
            and np.isclose(self.p_max, other.p_max, rtol=1e-14, atol=0)
            and np.isclose(self.hbar, other.hbar, rtol=1e-14, atol=0)
            and np.isclose(self.mass, other.mass, rtol=1e-14, atol=0)
            and np.isclose(self.c, other.c, rtol=1e-14, atol=0)
        )


def make_grid(n=1024, p_max=16.0, hbar=1.0, mass=1.0, c=1.0, e_charge=1.0):
    """Validate parameters and build a :class:`PhaseSpaceGrid`."""
    if int(n) != n or n < 8:
        raise GridError(f"n must be an integer >= 8, got {n}")
    if n % 2:
        raise GridError(f"n must be even, got {n}")
    for name, value in (("p_max", p_max), ("hbar", hbar), ("mass", mass), ("c", c)):
        if not np.isfinite(value) or value <= 0:
            raise GridError(f"{name} must be a positive finite number, got {value}")
    if not np.isfinite(e_charge):
        raise GridError("e_charge must be finite")
    return PhaseSpaceGrid(int(n), float(p_max), float(hbar), float(mass), float(c), float(e_charge))


def _check_axis(f, grid, axis):
    if f.shape[axis] != grid.n:
        raise GridError(f"axis {axis} has length {f.shape[axis]}, grid has n={grid.n}")


def dft_minus(f, axis=-1):
    """Unitary DFT with kernel ``exp(-2 pi i (m - n/2)(j - n/2) / n)``."""
    return np.fft.fftshift(
        np.fft.fft(np.fft.ifftshift(f, axes=axis), axis=axis, norm="ortho"), axes=axis
    )


def dft_plus(f, axis=-1):
    """Inverse of :func:`dft_minus`."""
    return np.fft.fftshift(
        np.fft.ifft(np.fft.ifftshift(f, axes=axis), axis=axis, norm="ortho"), axes=axis
    )


def transform_q_to_P(f, grid, axis=-1):
    """Unitary transform of a field along its ``q`` axis to the ``P`` axis."""
    f = np.asarray(f)
    _check_axis(f, grid, axis)
    return dft_minus(f, axis=axis)


def transform_P_to_q(F, grid, axis=-1):
    """Exact inverse of :func:`transform_q_to_P`."""
    F = np.asarray(F)
    _check_axis(F, grid, axis)
    return dft_plus(F, axis=axis)


def quadrature(f, grid, axes=("p",)):
    """Riemann sum of ``f`` over the labelled trailing axes.

    ``axes`` names the variables spanned by the last ``len(axes)`` array axes,
    any of ``"p"``, ``"q"``, ``"P"``.
    """
    f = np.asarray(f)
    if f.ndim < len(axes):
        raise GridError(f"field has {f.ndim} axes, {len(axes)} labels given")
    weight = 1.0
    for k, label in enumerate(axes):
        axis = f.ndim - len(axes) + k
        _check_axis(f, grid, axis)
        if label in ("p", "P"):
            weight *= grid.dp
        elif label == "q":
            weight *= grid.dq
        else:
            raise GridError(f"unknown axis label {label!r}")
    reduce_axes = tuple(range(f.ndim - len(axes), f.ndim))
    return f.sum(axis=reduce_axes) * weight


def half_shift(f, axis=-1, direction=1):
    """Trigonometric interpolation of ``f`` to nodes displaced by half a step.

    ``direction=+1`` returns values at ``x_k + dx/2``; ``-1`` undoes it
    exactly (the operation is a unitary phase in Fourier space).
    """
    f = np.asarray(f, dtype=complex)
    n = f.shape[axis]
    s = np.fft.fftfreq(n) * n
    phase = np.exp(1j * np.pi * direction * s / n)
    shape = [1] * f.ndim
    shape[axis] = n
    return np.fft.ifft(np.fft.fft(f, axis=axis) * phase.reshape(shape), axis=axis)


def spectral_derivative(f, spacing, order=1, axis=-1):
    """Periodic spectral derivative along ``axis``; the Nyquist mode is dropped
    for odd orders."""
    f = np.asarray(f)
    n = f.shape[axis]
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=spacing)
    mult = (1j * k) ** order
    if order % 2 and n % 2 == 0:
        mult[n // 2] = 0.0
    shape = [1] * f.ndim
    shape[axis] = n
    out = np.fft.ifft(np.fft.fft(f, axis=axis) * mult.reshape(shape), axis=axis)
    if np.isrealobj(f):
        return out.real
    return out


def check_decay(psi_p, grid, tol=DECAY_TOL, what="state"):
    """Return ``(p_edge, q_edge)`` magnitudes of a momentum-space wavefunction.

    ``p_edge`` is ``max |psi|`` at the two outermost momentum nodes,
    ``q_edge`` the same for the coordinate-space wavefunction relative to its
    peak (catches under-resolved momentum sampling and q-window overflow).
    """
    psi_p = np.asarray(psi_p)
    p_edge = float(max(np.abs(psi_p[..., 0]).max(), np.abs(psi_p[..., -1]).max()))
    psi_q = dft_plus(psi_p, axis=-1)
    peak = np.abs(psi_q).max()
    if peak == 0:
        return p_edge, 0.0
    q_edge = float(max(np.abs(psi_q[..., 0]).max(), np.abs(psi_q[..., -1]).max()) / peak)
    return p_edge, q_edge


def warn_if_not_decayed(psi_p, grid, what="state", tol=DECAY_TOL):
    p_edge, q_edge = check_decay(psi_p, grid)
    if p_edge > tol or q_edge > tol:
        warnings.warn(
            f"{what} does not decay at the grid boundary "
            f"(|psi(p_edge)|={p_edge:.2e}, |psi(q_edge)|/max={q_edge:.2e})",
            RuntimeWarning,
            stacklevel=3,
        )
        return False
    return True
