"""Matrix-valued Weyl calculus on the discrete phase space.

Symbols ``A(p, q)`` are sampled on ``grid.p x grid.q``; operator kernels
``<p1|A|p2>`` on ``grid.p x grid.p``.  Both carry optional leading axes for
the 2x2 charge structure, so a matrix symbol has shape ``(2, 2, n, n)`` and a
charge-invariant scalar one ``(n, n)``.

The symbol/kernel correspondence goes through the mixed representation

    A~(p, P) = (2 pi hbar)^{-1} int A(p, q) exp(-i P q / hbar) dq,
    <p1|A|p2> = A~((p1 + p2) / 2, p1 - p2).

On the lattice, ``(p1 + p2) / 2`` falls on a half node whenever ``p1 - p2`` is
an odd multiple of ``dp``; those rows are obtained by trigonometric
interpolation along ``p``.  The pairing of ``(k1, k2)`` with ``(p, P)`` is taken
modulo the grid period so the map is a bijection and the round trip is exact.
Wrapped pairs (``|p1 - p2| >= p_max``) have no continuum meaning; symbols and
states must be localized well inside the window for them not to matter.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .grid import PhaseSpaceGrid, dft_minus, dft_plus, half_shift, spectral_derivative
from .kinematics import DELTA, NILPOTENT, TAU3

__all__ = [
    "MatrixSymbol",
    "OperatorKernel",
    "symbol_from_function",
    "scalar_to_matrix",
    "symbol_to_mixed",
    "mixed_to_symbol",
    "mixed_to_kernel",
    "kernel_to_mixed",
    "symbol_to_kernel",
    "kernel_to_symbol",
    "compose",
    "star_product",
    "moyal_bracket",
    "poisson_bracket",
    "classical_limit_bracket",
    "sine_series_bracket",
    "hamiltonian_symbol",
    "apply_kernel",
]


@dataclass(frozen=True, eq=False)
class MatrixSymbol:
    """Weyl symbol on the ``(p, q)`` grid; ``values`` is ``(2, 2, n, n)`` or ``(n, n)``."""

    grid: PhaseSpaceGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape[-2:] != (self.grid.n, self.grid.n) or v.ndim not in (2, 4):
            raise ValueError(f"symbol shape {v.shape} incompatible with n={self.grid.n}")
        object.__setattr__(self, "values", v)

    @property
    def is_matrix(self) -> bool:
        return self.values.ndim == 4

    def is_charge_invariant(self, atol=1e-12) -> bool:
        if not self.is_matrix:
            return True
        v = self.values
        return (
            np.abs(v[0, 1]).max() <= atol
            and np.abs(v[1, 0]).max() <= atol
            and np.abs(v[0, 0] - v[1, 1]).max() <= atol
        )

    def scalar(self) -> np.ndarray:
        """The scalar field of a charge-invariant symbol."""
        if not self.is_matrix:
            return self.values
        if not self.is_charge_invariant():
            raise ValueError("symbol is not charge-invariant")
        return self.values[0, 0]

    def as_matrix(self) -> "MatrixSymbol":
        if self.is_matrix:
            return self
        return scalar_to_matrix(self)

    def __add__(self, other):
        return MatrixSymbol(self.grid, self.values + other.values)

    def __sub__(self, other):
        return MatrixSymbol(self.grid, self.values - other.values)

    def __mul__(self, scalar):
        return MatrixSymbol(self.grid, self.values * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class OperatorKernel:
    """Momentum-basis kernel ``<p1|A|p2>``; ``values`` is ``(2, 2, n, n)`` or ``(n, n)``."""

    grid: PhaseSpaceGrid
    values: np.ndarray
    representation: str = "usual"

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape[-2:] != (self.grid.n, self.grid.n):
            raise ValueError(f"kernel shape {v.shape} incompatible with n={self.grid.n}")
        object.__setattr__(self, "values", v)

    @property
    def is_matrix(self) -> bool:
        return self.values.ndim == 4

    def is_hermitian(self, atol=1e-10) -> bool:
        v = self.values
        if self.is_matrix:
            vh = np.conj(np.transpose(v, (1, 0, 3, 2)))
        else:
            vh = np.conj(v.T)
        return bool(np.abs(v - vh).max() <= atol * max(1.0, np.abs(v).max()))

    def __add__(self, other):
        return OperatorKernel(self.grid, self.values + other.values, self.representation)

    def __sub__(self, other):
        return OperatorKernel(self.grid, self.values - other.values, self.representation)

    def __mul__(self, scalar):
        return OperatorKernel(self.grid, self.values * scalar, self.representation)

    __rmul__ = __mul__


def symbol_from_function(grid, func, matrix=None):
    """Sample ``func(p, q)`` on the grid; ``matrix`` (2x2) makes a matrix symbol."""
    p = grid.p[:, None]
    q = grid.q[None, :]
    field = np.broadcast_to(np.asarray(func(p, q), dtype=complex), (grid.n, grid.n)).copy()
    if matrix is None:
        return MatrixSymbol(grid, field)
    return MatrixSymbol(grid, np.asarray(matrix, dtype=complex)[:, :, None, None] * field)


def scalar_to_matrix(symbol):
    return MatrixSymbol(symbol.grid, DELTA[:, :, None, None] * symbol.values[None, None])


@lru_cache(maxsize=16)
def _pair_index(n):
    """Map node pairs ``(k1, k2)`` to doubled-lattice row ``s`` and ``P`` column."""
    k1, k2 = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    m_raw = k1 - k2
    m = (m_raw + n // 2) % n - n // 2
    s = (k1 + k2 - (m_raw - m)) % (2 * n)
    return s, m + n // 2


def symbol_to_mixed(values, grid):
    """``A~(p_k, P_m)`` on nodes, same leading axes as ``values``."""
    return dft_minus(np.asarray(values, dtype=complex), axis=-1) / (np.sqrt(grid.n) * grid.dp)


def mixed_to_symbol(mixed, grid):
    return dft_plus(mixed, axis=-1) * (np.sqrt(grid.n) * grid.dp)


def mixed_to_kernel(mixed, grid):
    n = grid.n
    s, col = _pair_index(n)
    doubled = np.empty(mixed.shape[:-2] + (2 * n, n), dtype=complex)
    doubled[..., 0::2, :] = mixed
    doubled[..., 1::2, :] = half_shift(mixed, axis=-2, direction=1)
    return doubled[..., s, col]


def kernel_to_mixed(kernel, grid):
    n = grid.n
    s, col = _pair_index(n)
    kernel = np.asarray(kernel, dtype=complex)
    doubled = np.zeros(kernel.shape[:-2] + (2 * n, n), dtype=complex)
    doubled[..., s, col] = kernel
    odd = (grid.m_index % 2).astype(bool)
    mixed = doubled[..., 0::2, :].copy()
    mixed[..., :, odd] = half_shift(doubled[..., 1::2, :], axis=-2, direction=-1)[..., :, odd]
    return mixed


def symbol_to_kernel(symbol):
    """Momentum-basis kernel of the Weyl-quantized symbol."""
    g = symbol.grid
    return OperatorKernel(g, mixed_to_kernel(symbol_to_mixed(symbol.values, g), g))


def kernel_to_symbol(kernel):
    """Weyl symbol reconstructed from a momentum-basis kernel."""
    g = kernel.grid
    return MatrixSymbol(g, mixed_to_symbol(kernel_to_mixed(kernel.values, g), g))


def compose(k1, k2):
    """Operator product as kernel composition with the ``dp`` weight."""
    a, b = k1.values, k2.values
    dp = k1.grid.dp
    if a.ndim == 4 and b.ndim == 4:
        out = np.einsum("abij,bcjk->acik", a, b, optimize=True) * dp
    elif a.ndim == 4:
        out = np.einsum("abij,jk->abik", a, b, optimize=True) * dp
    elif b.ndim == 4:
        out = np.einsum("ij,abjk->abik", a, b, optimize=True) * dp
    else:
        out = (a @ b) * dp
    return OperatorKernel(k1.grid, out, k1.representation)


def apply_kernel(kernel, psi):
    """Act with a kernel on a wavefunction; ``psi`` is ``(n,)`` or ``(2, n)``."""
    v = kernel.values
    dp = kernel.grid.dp
    if v.ndim == 4:
        return np.einsum("abij,bj->ai", v, psi) * dp
    return (v @ psi.T).T * dp


def star_product(a, b):
    """Symbol of the operator product, computed by kernel composition."""
    return kernel_to_symbol(compose(symbol_to_kernel(a), symbol_to_kernel(b)))


def moyal_bracket(a, b):
    hbar = a.grid.hbar
    return (star_product(a, b) - star_product(b, a)) * (1.0 / (1j * hbar))


def _d(values, grid, dq_order=0, dp_order=0):
    out = values
    if dq_order:
        out = spectral_derivative(out, grid.dq, dq_order, axis=-1)
    if dp_order:
        out = spectral_derivative(out, grid.dp, dp_order, axis=-2)
    return out


def _field_product(x, y):
    if x.ndim == 4 and y.ndim == 4:
        return np.einsum("abij,bcij->acij", x, y)
    return x * y


def poisson_bracket(a, b):
    """Matrix-ordered ``dA/dq dB/dp - dA/dp dB/dq`` with spectral derivatives."""
    g = a.grid
    av, bv = a.values, b.values
    out = _field_product(_d(av, g, dq_order=1), _d(bv, g, dp_order=1)) - _field_product(
        _d(av, g, dp_order=1), _d(bv, g, dq_order=1)
    )
    return MatrixSymbol(g, out)


def classical_limit_bracket(a, b, hbar=None):
    """``[A, B] / (i hbar) + ({A, B}_P - {B, A}_P) / 2``."""
    g = a.grid
    hbar = g.hbar if hbar is None else hbar
    commutator = _field_product(a.values, b.values) - _field_product(b.values, a.values)
    poisson = poisson_bracket(a, b).values - poisson_bracket(b, a).values
    return MatrixSymbol(g, commutator / (1j * hbar) + 0.5 * poisson)


def sine_series_bracket(a, b, terms=3):
    """Partial sum of ``(2/hbar) sin(hbar/2 Lambda)`` for scalar symbols."""
    if a.is_matrix or b.is_matrix:
        raise ValueError("the sine-series bracket is defined for scalar symbols")
    g = a.grid
    av, bv = a.values, b.values
    total = np.zeros_like(av, dtype=complex)
    for k in range(terms):
        r = 2 * k + 1
        lam = np.zeros_like(total)
        for j in range(r + 1):
            left = _d(av, g, dq_order=j, dp_order=r - j)
            right = _d(bv, g, dq_order=r - j, dp_order=j)
            lam += comb(r, j) * (-1) ** (r - j) * left * right
        total += (-1) ** k * (g.hbar / 2) ** (2 * k) / factorial(r) * lam
    return MatrixSymbol(g, total)


def hamiltonian_symbol(grid, phi=None, a_vec=None):
    """Klein-Gordon Hamiltonian symbol in the usual representation.

    ``H = (tau3 + i tau2) (p - e A(q))^2 / 2m + tau3 m c^2 + e phi(q)``;
    ``phi`` and ``a_vec`` are sampled on ``grid.q`` (``None`` means zero).
    """
    n = grid.n
    phi = np.zeros(n) if phi is None else np.asarray(phi, dtype=float)
    a_vec = np.zeros(n) if a_vec is None else np.asarray(a_vec, dtype=float)
    if phi.shape != (n,) or a_vec.shape != (n,):
        raise ValueError("potentials must be sampled on grid.q")
    e = grid.e_charge
    kinetic = (grid.p[:, None] - e * a_vec[None, :]) ** 2 / (2.0 * grid.mass)
    potential = np.broadcast_to(e * phi[None, :], (n, n))
    values = (
        NILPOTENT[:, :, None, None] * kinetic
        + TAU3[:, :, None, None] * grid.mass * grid.c**2
        + DELTA[:, :, None, None] * potential
    )
    return MatrixSymbol(grid, values)
