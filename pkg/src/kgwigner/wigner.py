"""Wigner functions of Feshbach-Villars states.

Components are built in the mixed ``(p, P)`` representation and transformed
to ``(p, q)`` with

    W(p, q) = (2 pi hbar)^{-1} int f(p, P) exp(-i P q / hbar) dP.

For a state ``(psi^+, psi^-)`` the mixed-representation products are

    f_pp =  eps  psi+*(p + P/2) psi+(p - P/2)
    f_mm = -eps  psi-*(p + P/2) psi-(p - P/2)
    f_pm =  chi  psi+*(p + P/2) psi-(p - P/2)
    f_mp = -chi  psi-*(p + P/2) psi+(p - P/2)

The minus signs come from lowering the charge index with the indefinite
metric ``diag(1, -1)``.  Values at half nodes ``p_k + dp/2`` are obtained by
trigonometric interpolation of the sampled wavefunction; the kinematic factors
are evaluated analytically at the staggered momenta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import dft_minus, dft_plus, half_shift, warn_if_not_decayed
from .kinematics import Kinematics
from .states import FV, USUAL, RepresentationError
from .weyl import MatrixSymbol

__all__ = [
    "WignerComponents",
    "staggered_products",
    "mixed_to_wigner",
    "wigner_to_mixed",
    "standard_wigner",
    "fv_wigner_components",
    "matrix_wigner",
    "evolve_components",
    "momentum_marginal",
    "coordinate_quasidensity",
    "constraint_residual",
    "reality_report",
    "mixture",
]


def _doubled(psi):
    """Values on the doubled lattice: even slots nodes, odd slots half nodes."""
    psi = np.asarray(psi, dtype=complex)
    out = np.empty(psi.shape[:-1] + (2 * psi.shape[-1],), dtype=complex)
    out[..., 0::2] = psi
    out[..., 1::2] = half_shift(psi, axis=-1, direction=1)
    return out


def _stagger_indices(n):
    k = np.arange(n)[:, None]
    m = (np.arange(n) - n // 2)[None, :]
    plus = 2 * k + m
    minus = 2 * k - m
    return plus, minus


def staggered_products(psi_a, psi_b):
    """``conj(psi_a(p + P/2)) psi_b(p - P/2)`` on the ``(p, P)`` lattice.

    Arguments falling outside the momentum window contribute zero.  The
    Nyquist column holds the mean of the ``P = -p_max`` and ``P = +p_max``
    products, which keeps ``f(p, -P) = conj(f(p, P))`` exact there.
    """
    n = np.shape(psi_a)[-1]
    ha, hb = _doubled(psi_a), _doubled(psi_b)

    def gather(plus, minus):
        ok = (plus >= 0) & (plus < 2 * n) & (minus >= 0) & (minus < 2 * n)
        a = np.where(ok, np.conj(ha[..., np.clip(plus, 0, 2 * n - 1)]), 0.0)
        b = np.where(ok, hb[..., np.clip(minus, 0, 2 * n - 1)], 0.0)
        return a * b

    plus, minus = _stagger_indices(n)
    out = gather(plus, minus)
    k = np.arange(n)
    out[..., 0] = 0.5 * (out[..., 0] + gather(2 * k + n // 2, 2 * k - n // 2))
    return out


def mixed_to_wigner(f, grid):
    """``(2 pi hbar)^{-1} int f exp(-i P q / hbar) dP`` along the last axis."""
    return dft_minus(f, axis=-1) / (np.sqrt(grid.n) * grid.dq)


def wigner_to_mixed(w, grid):
    return dft_plus(w, axis=-1) * (np.sqrt(grid.n) * grid.dq)


@dataclass(frozen=True, eq=False)
class WignerComponents:
    """The four charge components ``W_+^+, W_-^-, W_+^-, W_-^+`` over ``(p, q)``."""

    grid: object
    w_pp: np.ndarray
    w_mm: np.ndarray
    w_pm: np.ndarray
    w_mp: np.ndarray

    def __post_init__(self):
        shape = (self.grid.n, self.grid.n)
        for name in ("w_pp", "w_mm", "w_pm", "w_mp"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            object.__setattr__(self, name, arr)

    @property
    def even(self):
        return self.w_pp + self.w_mm

    @property
    def odd(self):
        return self.w_pm + self.w_mp

    @property
    def scalar(self):
        """Total Wigner function ``w_pp + w_mm + w_pm + w_mp``."""
        return self.even + self.odd

    def mixed(self):
        """The four components in the ``(p, P)`` representation."""
        g = self.grid
        return tuple(wigner_to_mixed(x, g) for x in (self.w_pp, self.w_mm, self.w_pm, self.w_mp))

    @classmethod
    def from_mixed(cls, grid, f_pp, f_mm, f_pm, f_mp):
        return cls(grid, *(mixed_to_wigner(f, grid) for f in (f_pp, f_mm, f_pm, f_mp)))

    def integrals(self):
        g = self.grid
        w = g.dp * g.dq
        return {k: complex(getattr(self, k).sum() * w) for k in ("w_pp", "w_mm", "w_pm", "w_mp")}

    def _check(self, other):
        if not self.grid.same_as(other.grid):
            raise ValueError("Wigner components live on different grids")

    def __add__(self, other):
        self._check(other)
        return WignerComponents(
            self.grid,
            self.w_pp + other.w_pp,
            self.w_mm + other.w_mm,
            self.w_pm + other.w_pm,
            self.w_mp + other.w_mp,
        )

    def __mul__(self, s):
        return WignerComponents(self.grid, self.w_pp * s, self.w_mm * s, self.w_pm * s, self.w_mp * s)

    __rmul__ = __mul__


def standard_wigner(psi, grid):
    """Ordinary Wigner transform of a one-component momentum wavefunction."""
    return mixed_to_wigner(staggered_products(psi, psi), grid)


def fv_wigner_components(state):
    if state.representation != FV:
        raise RepresentationError("fv_wigner_components expects an FV-representation state")
    g = state.grid
    warn_if_not_decayed(state.components, g)
    eps, chi = Kinematics(g).staggered_epsilon_chi()
    up, dn = state.psi_plus, state.psi_minus
    zero = np.zeros((g.n, g.n), dtype=complex)
    has_up, has_dn = bool(np.any(up)), bool(np.any(dn))
    f_pp = eps * staggered_products(up, up) if has_up else zero
    f_mm = -eps * staggered_products(dn, dn) if has_dn else zero
    if has_up and has_dn:
        f_pm = chi * staggered_products(up, dn)
        f_mp = -chi * staggered_products(dn, up)
    else:
        f_pm = f_mp = zero
    return WignerComponents.from_mixed(g, f_pp, f_mm, f_pm, f_mp)


def matrix_wigner(state):
    """Matrix-valued Wigner function of a usual-representation state.

    ``W[a, b]`` is built from ``psi_a(p - P/2) conj(psi_b(p + P/2))`` so that
    ``sum_ab int A[a, b] W[b, a] dp dq`` is the expectation value of the
    Weyl-quantized matrix symbol ``A`` with the positive-definite inner product.
    """
    if state.representation != USUAL:
        raise RepresentationError("matrix_wigner expects a usual-representation state")
    g = state.grid
    comps = state.components
    values = np.empty((2, 2, g.n, g.n), dtype=complex)
    for a in range(2):
        for b in range(2):
            values[a, b] = mixed_to_wigner(staggered_products(comps[b], comps[a]), g)
    return MatrixSymbol(g, values)


def evolve_components(w, t):
    """Free evolution of Wigner components by exact phases in ``(p, P)``.

    Even components pick up ``exp(+i alpha (E(p+P/2) - E(p-P/2)) t / hbar)``,
    odd ones ``exp(+i alpha (E(p+P/2) + E(p-P/2)) t / hbar)``, with
    ``alpha = +1`` for ``W_+^+``, ``W_+^-`` and ``-1`` for ``W_-^-``, ``W_-^+``.
    These signs reproduce the Wigner map of ``evolve_free``.
    """
    g = w.grid
    e_plus, e_minus = Kinematics(g).staggered_energies()
    diff = np.exp(1j * (e_plus - e_minus) * t / g.hbar)
    summ = np.exp(1j * (e_plus + e_minus) * t / g.hbar)
    f_pp, f_mm, f_pm, f_mp = w.mixed()
    return WignerComponents.from_mixed(
        g, f_pp * diff, f_mm * np.conj(diff), f_pm * summ, f_mp * np.conj(summ)
    )


def _single_charge_even(w):
    pp = np.abs(w.w_pp).max()
    mm = np.abs(w.w_mm).max()
    if pp > 0 and mm > 0:
        raise ValueError("marginals are defined for single-charge components")
    return (w.w_pp, 1.0) if pp > 0 else (w.w_mm, -1.0)


def momentum_marginal(w):
    """``int W_a^a dq`` for a single-charge state, returned as ``|psi^a(p)|^2``."""
    comp, sign = _single_charge_even(w)
    return sign * (comp.sum(axis=1) * w.grid.dq).real


def coordinate_quasidensity(w):
    """``int W_a^a dp``; not sign-definite for relativistic states."""
    comp, sign = _single_charge_even(w)
    return sign * (comp.sum(axis=0) * w.grid.dp).real


def constraint_residual(w):
    """Relative violation of the pure-state relation between even and odd parts.

    Compares ``(E+ - E-)^2 f_pp f_mm`` with ``(E+ + E-)^2 f_pm f_mp`` on the
    ``(p, P)`` lattice, where ``E+- = E(p +- P/2)``.
    """
    g = w.grid
    e_plus, e_minus = Kinematics(g).staggered_energies()
    f_pp, f_mm, f_pm, f_mp = w.mixed()
    lhs = (e_plus - e_minus) ** 2 * f_pp * f_mm
    rhs = (e_plus + e_minus) ** 2 * f_pm * f_mp
    scale = max(np.abs(lhs).max(), np.abs(rhs).max())
    if scale == 0:
        return 0.0
    return float(np.abs(lhs - rhs).max() / scale)


def reality_report(w):
    """``(max |Im w_aa|, max |w_mp - conj(w_pm)|)``."""
    im = max(np.abs(np.imag(w.w_pp)).max(), np.abs(np.imag(w.w_mm)).max())
    herm = np.abs(w.w_mp - np.conj(w.w_pm)).max()
    return float(im), float(herm)


def mixture(components, weights):
    """Convex combination of Wigner components."""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or not np.isclose(weights.sum(), 1.0):
        raise ValueError("mixture weights must be non-negative and sum to 1")
    out = components[0] * weights[0]
    for comp, s in zip(components[1:], weights[1:]):
        out = out + comp * s
    return out
