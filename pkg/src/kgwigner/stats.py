"""Averages, coordinate moments, purity diagnostics and the dispersion curve."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .fv_ops import fv_kernel
from .grid import dft_minus, make_grid
from .kinematics import Kinematics, energy
from .states import BoundaryDecayError, make_gaussian
from .weyl import MatrixSymbol, apply_kernel
from .wigner import fv_wigner_components

__all__ = [
    "RouteMismatchError",
    "MomentReport",
    "average",
    "kernel_average",
    "coordinate_moment",
    "second_moment_corrected",
    "epsilon_derivatives",
    "purity_criterion_residual",
    "overlap",
    "purity_functional",
    "Fig2Row",
    "fig2_curve",
    "dispersion_threshold",
]

MOMENT_RTOL = 1e-6


class RouteMismatchError(RuntimeError):
    """Two independent evaluations of the same quantity disagree."""


def _field(symbol):
    if isinstance(symbol, MatrixSymbol):
        return symbol.scalar()
    return np.asarray(symbol)


def average(symbol, w):
    """``int A (w_pp + w_mm + w_pm + w_mp) dp dq`` for a charge-invariant symbol."""
    g = w.grid
    return float(np.real((_field(symbol) * w.scalar).sum()) * g.dp * g.dq)


def kernel_average(symbol, state):
    """``<Psi|A|Psi>`` with the FV kernel of ``A`` and the indefinite metric."""
    if not isinstance(symbol, MatrixSymbol):
        symbol = MatrixSymbol(state.grid, np.asarray(symbol, dtype=complex))
    k = fv_kernel(symbol)
    out = apply_kernel(k, state.components)
    metric = np.array([1.0, -1.0])[:, None]
    return float(np.real((metric * np.conj(state.components) * out).sum()) * state.grid.dp)


# -- coordinate moments ------------------------------------------------------


def _single_component(state):
    if state.charge == 0:
        raise ValueError("coordinate moments are defined for single-charge states")
    return state.psi_plus if state.charge == 1 else state.psi_minus


def _q_power(psi, grid, power):
    """``(i hbar d/dp)^power psi`` evaluated as ``q^power`` in coordinate space."""
    if power == 0:
        return np.asarray(psi, dtype=complex)
    psi_q = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(psi), norm="ortho"))
    return dft_minus(grid.q**power * psi_q)


def _log_energy_derivative(p, order, mass, c):
    """``d^k/dp^k`` of ``ln sqrt(E)`` for ``k >= 1``."""
    alpha = mass * c
    z1 = (p - 1j * alpha) ** (-order)
    z2 = (p + 1j * alpha) ** (-order)
    return 0.25 * (-1) ** (order - 1) * math.factorial(order - 1) * np.real(z1 + z2)


def epsilon_derivatives(p, max_order, mass=1.0, c=1.0):
    """``d^k eps(p, p')/dp'^k`` at ``p' = p`` for ``k = 0..max_order``.

    ``eps = cosh(u)`` with ``u = ln sqrt(E(p')) - ln sqrt(E(p))``; the Taylor
    series of ``u`` in ``h = p' - p`` is composed with that of ``cosh``.
    """
    p = np.asarray(p, dtype=float)
    u = np.zeros((max_order + 1,) + p.shape)
    for j in range(1, max_order + 1):
        u[j] = _log_energy_derivative(p, j, mass, c) / math.factorial(j)
    eps = np.zeros_like(u)
    eps[0] = 1.0
    power = np.zeros_like(u)
    power[0] = 1.0
    for j in range(1, max_order + 1):
        nxt = np.zeros_like(u)
        for a in range(max_order + 1):
            for b in range(1, max_order + 1 - a):
                nxt[a + b] += power[a] * u[b]
        power = nxt
        if j % 2 == 0:
            eps += power / math.factorial(j)
    return np.array([eps[k] * math.factorial(k) for k in range(max_order + 1)])


@dataclass(frozen=True)
class MomentReport:
    order: int
    value: float
    grid_value: float
    route: str = "formula"

    @property
    def mismatch(self) -> float:
        return abs(self.value - self.grid_value)


def _formula_moment(state, order):
    g = state.grid
    psi = _single_component(state)
    derivs = epsilon_derivatives(g.p, order, g.mass, g.c)
    total = 0.0 + 0.0j
    for k in range(order + 1):
        if not np.any(derivs[k]):
            continue
        term = np.conj(psi) * derivs[k] * _q_power(psi, g, order - k)
        total += math.comb(order, k) * (1j * g.hbar) ** k * term.sum()
    norm = (np.abs(psi) ** 2).sum()
    return float(np.real(total / norm))


def _grid_moment(state, order, w=None):
    g = state.grid
    w = fv_wigner_components(state) if w is None else w
    comp = w.w_pp if state.charge == 1 else w.w_mm
    qn = g.q[None, :] ** order
    return float(np.real((qn * comp).sum() / comp.sum()))


def coordinate_moment(state, order, w=None, rtol=MOMENT_RTOL):
    """``<q^n>`` by the derivative formula, validated against ``int q^n W``.

    Raises :class:`RouteMismatchError` when the routes differ by more than
    ``rtol`` relative to ``<q^2>^(n/2)``.
    """
    if order not in (1, 2, 3, 4):
        raise ValueError(f"moment order must be 1..4, got {order}")
    value = _formula_moment(state, order)
    grid_value = _grid_moment(state, order, w)
    usual, _ = second_moment_corrected(state)
    scale = max(abs(value), abs(grid_value), usual ** (order / 2.0))
    if abs(value - grid_value) > rtol * scale:
        raise RouteMismatchError(
            f"<q^{order}> formula route {value:.12g} != grid route {grid_value:.12g}"
        )
    return MomentReport(order, value, grid_value)


def second_moment_corrected(state):
    """Return ``(usual, correction)`` with ``<q^2> = usual - correction``.

    ``usual`` is the nonrelativistic ``int q^2 |psi(q)|^2 dq`` and
    ``correction = hbar^2 int |psi(p)|^2 (c^2 p / 2E^2)^2 dp``.
    """
    g = state.grid
    psi = _single_component(state)
    norm = (np.abs(psi) ** 2).sum()
    psi_q = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(psi), norm="ortho"))
    usual = float((g.q**2 * np.abs(psi_q) ** 2).sum() / norm)
    e = energy(g.p, g.mass, g.c)
    rate = g.c**2 * g.p / (2.0 * e**2)
    correction = float(g.hbar**2 * (np.abs(psi) ** 2 * rate**2).sum() / norm)
    return usual, correction


# -- purity ------------------------------------------------------------------


def _criterion_rhs(p1, p2, grid, component):
    e1, e2 = energy(p1, grid.mass, grid.c), energy(p2, grid.mass, grid.c)
    num = grid.c**4 * p1 * p2 / (e1 * e2)
    if component == "even":
        return -num / (e1 + e2) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / (e1 - e2) ** 2


def _stencil_ratio(f):
    """``f(k+1,m) f(k-1,m) / (f(k,m+2) f(k,m-2))`` on the interior, 1 elsewhere."""
    ratio = np.ones(f.shape, dtype=complex)
    with np.errstate(all="ignore"):
        ratio[1:-1, 2:-2] = f[2:, 2:-2] * f[:-2, 2:-2] / (f[1:-1, 4:] * f[1:-1, :-4])
    return ratio


def purity_criterion_residual(w, component="even", floor=1e-8, rhs="analytic"):
    """Residual of the mixed log-derivative identity on the ``(p, P)`` lattice.

    For a pure state ``d^2 ln f / dp1 dp2`` of the mixed-representation
    component equals that of the kinematic factor alone.  The left side uses
    central differences with step ``dp`` in both ``p1`` and ``p2``.  With
    ``rhs="analytic"`` the right side is the closed form
    ``-+ c^4 p1 p2 / (E1 E2 (E1 +- E2)^2)``; ``rhs="stencil"`` applies the
    same difference stencil to the exact kinematic factor, which removes the
    truncation error (useful for the odd part, whose factor vanishes on the
    lines ``p1 = +-p2``).  Returns an ``(n, n)`` array, NaN outside the
    probed region.
    """
    if component not in ("even", "odd"):
        raise ValueError("component must be 'even' or 'odd'")
    if rhs not in ("analytic", "stencil"):
        raise ValueError("rhs must be 'analytic' or 'stencil'")
    g = w.grid
    f_pp, f_mm, f_pm, _ = w.mixed()
    if component == "even":
        f = f_pp if np.abs(f_pp).max() >= np.abs(f_mm).max() else f_mm
    else:
        f = f_pm
    amp = np.abs(f)
    if amp.max() == 0:
        raise ValueError("component is identically zero; criterion region is empty")
    n = g.n
    ok = amp > floor * amp.max()
    region = np.zeros((n, n), dtype=bool)
    region[1:-1, 2:-2] = (
        ok[1:-1, 2:-2] & ok[2:, 2:-2] & ok[:-2, 2:-2] & ok[1:-1, 4:] & ok[1:-1, :-4]
    )
    p1, p2 = Kinematics(g).staggered()
    eps, chi = Kinematics(g).staggered_epsilon_chi()
    kin = eps if component == "even" else chi
    kin_ok = np.abs(kin) > 1e-12
    region[1:-1, 2:-2] &= (
        kin_ok[1:-1, 2:-2] & kin_ok[2:, 2:-2] & kin_ok[:-2, 2:-2] & kin_ok[1:-1, 4:] & kin_ok[1:-1, :-4]
    )
    if not region.any():
        raise ValueError("criterion region is empty after the magnitude floor")
    scale = 4.0 * g.dp**2
    ratio = _stencil_ratio(f)
    with np.errstate(all="ignore"):
        if rhs == "stencil":
            res = np.log(np.where(region, ratio / _stencil_ratio(kin), 1.0)) / scale
        else:
            lhs = np.log(np.where(region, ratio, 1.0)) / scale
            res = lhs - _criterion_rhs(p1, p2, g, component)
    return np.where(region, np.abs(res), np.nan)


def _lagrange_center_weights(half_width=4):
    nodes = [x for x in range(-half_width, half_width + 1) if x != 0]
    weights = []
    for i, xi in enumerate(nodes):
        wgt = 1.0
        for j, xj in enumerate(nodes):
            if i != j:
                wgt *= (0 - xj) / (xi - xj)
        weights.append(wgt)
    return np.array(nodes), np.array(weights)


def _fill_chi_zeros(g_field, n):
    """Fill the ``P = 0`` column and ``p = 0`` row by 8-point interpolation."""
    nodes, weights = _lagrange_center_weights()
    c = n // 2
    out = g_field.copy()
    col = (out[:, c + nodes] * weights).sum(axis=1)
    rows = np.arange(n) != c
    out[rows, c] = col[rows]
    out[c, :] = (out[c + nodes, :] * weights[:, None]).sum(axis=0)
    return out


def overlap(wa, wb):
    """``|<Psi|Phi>|^2`` from two sets of Wigner components.

    Evaluated in ``(p, P)`` where the inverse kinematic factors are pointwise:
    even products are divided by ``eps^2`` and the odd cross products by
    ``chi^2``.  The odd integrand has a finite limit where ``chi = 0``; those
    entries are interpolated from their neighbours.
    """
    if not wa.grid.same_as(wb.grid):
        raise ValueError("overlap needs components on the same grid")
    g = wa.grid
    n = g.n
    eps, chi = Kinematics(g).staggered_epsilon_chi()
    fa = wa.mixed()
    fb = [x[:, (-np.arange(n)) % n] for x in wb.mixed()]  # P -> -P
    even = (fa[0] * fb[0] + fa[1] * fb[1]) / eps**2
    cross = fa[2] * fb[3] + fa[3] * fb[2]
    c = n // 2
    mask = np.ones((n, n), dtype=bool)
    mask[:, c] = False
    mask[c, :] = False
    with np.errstate(divide="ignore", invalid="ignore"):
        odd = np.where(mask, cross / np.where(mask, chi, 1.0) ** 2, 0.0)
    if np.any(cross):
        odd = _fill_chi_zeros(odd, n)
    total = (even + odd).sum() * g.dp**2
    return float(np.real(total))


def purity_functional(w):
    """``(2 pi hbar)^{-1} |<Psi|Psi>|^2`` generalised to mixtures; at most ``1/(2 pi hbar)``."""
    return overlap(w, w) / (2.0 * np.pi * w.grid.hbar)


# -- dispersion curve --------------------------------------------------------


@dataclass(frozen=True)
class Fig2Row:
    sigma_p: float
    dx2_usual: float
    dx2_corrected: float
    reference_dx2: float
    adapted: bool = False


def _representable_gaussian(sigma2, grid, adapt):
    try:
        return make_gaussian(grid, sigma2), False
    except BoundaryDecayError:
        if not adapt:
            raise
    sigma = math.sqrt(sigma2)
    local = make_grid(grid.n, 12.0 * sigma, grid.hbar, grid.mass, grid.c)
    return make_gaussian(local, sigma2), True


def _dispersion(sigma2, grid, adapt=True):
    state, adapted = _representable_gaussian(sigma2, grid, adapt)
    usual, corr = second_moment_corrected(state)
    return usual, usual - corr, adapted


def fig2_curve(sigma2_list, grid, adapt=True):
    """Position dispersion of the Gaussian state against ``sigma_p``.

    When a packet is too narrow for the given momentum spacing the same
    number of nodes is spread over ``|p| < 12 sigma_p`` instead (``adapt``).
    Unrepresentable points are reported as NaN rows with a warning.
    """
    rows = []
    for s2 in sigma2_list:
        s2 = float(s2)
        ref = grid.hbar**2 / (4.0 * s2)
        try:
            usual, corrected, adapted = _dispersion(s2, grid, adapt)
        except BoundaryDecayError as exc:
            warnings.warn(f"sigma2={s2:g} skipped: {exc}", RuntimeWarning, stacklevel=2)
            rows.append(Fig2Row(math.sqrt(s2), math.nan, math.nan, ref))
            continue
        rows.append(Fig2Row(math.sqrt(s2), usual, corrected, ref, adapted))
    return rows


def dispersion_threshold(grid, lo=0.5, hi=4.0, xtol=1e-5, adapt=True):
    """``sigma_p`` at which the corrected position dispersion changes sign."""

    def f(sigma):
        return _dispersion(sigma * sigma, grid, adapt)[1]

    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise ValueError(f"no sign change of dx^2 on [{lo}, {hi}]")
    return float(bisect(f, lo, hi, xtol=xtol))
