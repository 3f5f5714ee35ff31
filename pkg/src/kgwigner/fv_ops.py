"""Charge-invariant observables in the Feshbach-Villars representation.

For a symbol ``A(p, q) * delta`` the FV kernel is

    <p1|A|p2> = R(p1, p2) A~((p1 + p2) / 2, p1 - p2),   R = eps delta + chi tau1,

whose ``eps`` part preserves the charge sign (even part) and whose ``chi``
part mixes it (odd part).  All kinematic factors are evaluated at the kernel
nodes themselves.
"""

from __future__ import annotations

import numpy as np

from .kinematics import DELTA, NILPOTENT, TAU1, TAU3, Kinematics, energy_derivative, epsilon_chi
from .weyl import (
    MatrixSymbol,
    OperatorKernel,
    compose,
    kernel_to_mixed,
    mixed_to_symbol,
    symbol_to_kernel,
)

__all__ = [
    "UnrecoverableError",
    "fv_kernel",
    "even_kernel",
    "odd_kernel",
    "reconstruct_mixed",
    "reconstruct_symbol",
    "even_odd_relation_residual",
    "fv_hamiltonian_kernel",
    "heisenberg_kernel",
    "split_linear_symbol",
    "time_derivative_kernel_linear",
]

FV = "FV"


class UnrecoverableError(ValueError):
    """Kernel does not carry enough information to rebuild the symbol."""


def _scalar_field(symbol):
    if isinstance(symbol, MatrixSymbol):
        if symbol.is_matrix and not symbol.is_charge_invariant():
            raise ValueError("FV kernels are defined here for charge-invariant symbols only")
        return symbol.scalar()
    return np.asarray(symbol)


def _scalar_kernel(symbol):
    if not isinstance(symbol, MatrixSymbol):
        raise TypeError("expected a MatrixSymbol")
    grid = symbol.grid
    return grid, symbol_to_kernel(MatrixSymbol(grid, _scalar_field(symbol))).values


def _node_eps_chi(grid):
    p = grid.p
    return epsilon_chi(p[:, None], p[None, :], grid.mass, grid.c)


def fv_kernel(symbol):
    grid, k = _scalar_kernel(symbol)
    eps, chi = _node_eps_chi(grid)
    values = DELTA[:, :, None, None] * (eps * k) + TAU1[:, :, None, None] * (chi * k)
    return OperatorKernel(grid, values, FV)


def even_kernel(symbol):
    grid, k = _scalar_kernel(symbol)
    eps, _ = _node_eps_chi(grid)
    return OperatorKernel(grid, DELTA[:, :, None, None] * (eps * k), FV)


def odd_kernel(symbol):
    grid, k = _scalar_kernel(symbol)
    _, chi = _node_eps_chi(grid)
    return OperatorKernel(grid, TAU1[:, :, None, None] * (chi * k), FV)


def _strip_kinematics(kernel, mode, chi_floor):
    """Scalar kernel with the R / eps / chi factor divided out, plus validity mask."""
    grid = kernel.grid
    v = kernel.values
    eps, chi = _node_eps_chi(grid)
    valid = np.ones(eps.shape, dtype=bool)
    if mode == "full":
        r_inv = DELTA[:, :, None, None] * eps - TAU1[:, :, None, None] * chi
        m = np.einsum("abij,bcij->acij", v, r_inv)
        scalar = 0.5 * (m[0, 0] + m[1, 1])
    elif mode == "even":
        scalar = 0.5 * (v[0, 0] + v[1, 1]) / eps
    elif mode == "odd":
        valid = np.abs(chi) > chi_floor
        off = 0.5 * (v[0, 1] + v[1, 0])
        scalar = np.where(valid, off / np.where(valid, chi, 1.0), 0.0)
    else:
        raise ValueError(f"mode must be full, even or odd, got {mode!r}")
    return scalar, valid


def reconstruct_mixed(kernel, mode="full", chi_floor=1e-12):
    """Mixed-representation symbol ``A~(p, P)`` and a mask of recoverable entries.

    In odd mode the entries with ``chi(p + P/2, p - P/2) = 0`` (the ``P = 0``
    column and the ``p = 0`` row) cannot be recovered and are masked out.
    """
    scalar, valid = _strip_kinematics(kernel, mode, chi_floor)
    mixed = kernel_to_mixed(scalar, kernel.grid)
    valid_mixed = kernel_to_mixed(valid.astype(float), kernel.grid).real > 0.5
    return mixed, valid_mixed


def reconstruct_symbol(kernel, mode="full", even=None, chi_floor=1e-12, noise_floor=1e-13):
    """Rebuild the scalar symbol ``A(p, q)`` from an FV kernel.

    ``mode="odd"`` needs the even kernel ``even`` to fill the entries the odd
    part cannot determine.
    """
    grid = kernel.grid
    if mode == "odd":
        v = kernel.values
        off_scale = np.abs(v[0, 1]).max()
        if off_scale <= noise_floor * max(1.0, np.abs(v).max()) or off_scale == 0:
            raise UnrecoverableError("odd kernel has no off-diagonal content")
        mixed, valid = reconstruct_mixed(kernel, "odd", chi_floor)
        if not valid.all():
            if even is None:
                raise UnrecoverableError(
                    "odd part leaves entries with chi = 0 undetermined; pass the even kernel"
                )
            fill, _ = reconstruct_mixed(even, "even")
            mixed = np.where(valid, mixed, fill)
    else:
        mixed, _ = reconstruct_mixed(kernel, mode)
    return MatrixSymbol(grid, mixed_to_symbol(mixed, grid))


def even_odd_relation_residual(symbol):
    """Max deviation of the odd kernel from ``(E1 - E2)/(E1 + E2) tau1 [A]``."""
    ev = even_kernel(symbol)
    od = odd_kernel(symbol)
    grid = ev.grid
    kin = Kinematics(grid)
    e1, e2 = kin.E(grid.p)[:, None], kin.E(grid.p)[None, :]
    ratio = (e1 - e2) / (e1 + e2)
    predicted = np.einsum("gb,agij->abij", TAU1, ev.values) * ratio
    return float(np.abs(od.values - predicted).max())


def fv_hamiltonian_kernel(grid):
    """Free FV Hamiltonian ``E(p) tau3`` as a diagonal kernel."""
    e = Kinematics(grid).E_nodes
    diag = np.diag(e / grid.dp)
    return OperatorKernel(grid, TAU3[:, :, None, None] * diag, FV)


def heisenberg_kernel(kernel):
    """``(A H - H A) / (i hbar)`` with the free FV Hamiltonian, by composition."""
    h = fv_hamiltonian_kernel(kernel.grid)
    comm = compose(kernel, h) - compose(h, kernel)
    return comm * (1.0 / (1j * kernel.grid.hbar))


def split_linear_symbol(symbol, tol=1e-8):
    """Return ``(a(p), b(p))`` for ``A = a(p) + b(p) q``.

    Linearity is checked by second differences along ``q`` on the open grid,
    so the periodic seam of a sampled ``q`` does not count as curvature.
    """
    grid = symbol.grid
    a_field = _scalar_field(symbol)
    q = grid.q
    second = a_field[:, 2:] - 2 * a_field[:, 1:-1] + a_field[:, :-2]
    scale = max(1.0, np.abs(a_field).max())
    if np.abs(second).max() > tol * scale:
        raise ValueError("symbol is not linear in q")
    slope = (a_field[:, 1:] - a_field[:, :-1]) / grid.dq
    b = slope.mean(axis=1)
    a = (a_field - b[:, None] * q[None, :]).mean(axis=1)
    return a, b


def time_derivative_kernel_linear(symbol):
    """Diagonal kernel ``b(p) dE/dp (tau3 + i tau2)`` for ``A = a(p) + b(p) q``."""
    grid = symbol.grid
    _, b = split_linear_symbol(symbol)
    v = b * energy_derivative(grid.p, grid.mass, grid.c) / grid.dp
    return OperatorKernel(grid, NILPOTENT[:, :, None, None] * np.diag(v), FV)
