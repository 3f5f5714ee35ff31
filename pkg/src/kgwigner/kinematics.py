"""Relativistic kinematic functions of the Feshbach-Villars calculus.

Everything here is evaluated analytically at whatever momenta are passed in;
staggered arguments ``p +- P/2`` are never interpolated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import PhaseSpaceGrid

__all__ = [
    "DELTA",
    "TAU1",
    "TAU2",
    "TAU3",
    "Kinematics",
    "energy",
    "energy_derivative",
    "epsilon_chi",
    "R_matrix",
    "G_fn",
    "U_matrix",
    "U_inverse",
]

DELTA = np.eye(2, dtype=complex)
TAU1 = np.array([[0, 1], [1, 0]], dtype=complex)
TAU2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
TAU3 = np.array([[1, 0], [0, -1]], dtype=complex)
# (tau3 + i tau2) is nilpotent; it carries the kinetic term of the KG Hamiltonian
NILPOTENT = TAU3 + 1j * TAU2


def energy(p, mass=1.0, c=1.0):
    """Free-particle energy ``sqrt(m^2 c^4 + c^2 p^2)``."""
    p = np.asarray(p, dtype=float)
    return np.sqrt((mass * c * c) ** 2 + (c * p) ** 2)


def energy_derivative(p, mass=1.0, c=1.0):
    """Group velocity ``dE/dp = c^2 p / E``."""
    p = np.asarray(p, dtype=float)
    return c * c * p / energy(p, mass, c)


def epsilon_chi(p1, p2, mass=1.0, c=1.0):
    """Return ``(eps, chi)`` = ``(E1 +- E2) / (2 sqrt(E1 E2))``."""
    e1 = energy(p1, mass, c)
    e2 = energy(p2, mass, c)
    root = 2.0 * np.sqrt(e1 * e2)
    return (e1 + e2) / root, (e1 - e2) / root


def _matrix_field(scalars_and_mats, shape):
    out = np.zeros(shape + (2, 2), dtype=complex)
    for s, mat in scalars_and_mats:
        out += np.asarray(s)[..., None, None] * mat
    return out


def R_matrix(p1, p2, mass=1.0, c=1.0):
    """``eps * delta + chi * tau1``; broadcasts, trailing ``(2, 2)`` matrix axes."""
    eps, chi = epsilon_chi(p1, p2, mass, c)
    return _matrix_field([(eps, DELTA), (chi, TAU1)], np.shape(eps))


def G_fn(p1, p, p2, mass=1.0, c=1.0):
    """Three-argument matrix ``E(p)^2 / (2 sqrt(E(p1) E(p2))) (tau3 + i tau2)``."""
    scale = energy(p, mass, c) ** 2 / (2.0 * np.sqrt(energy(p1, mass, c) * energy(p2, mass, c)))
    return _matrix_field([(scale, NILPOTENT)], np.shape(scale))


def U_matrix(p, mass=1.0, c=1.0):
    """Transformation matrix from the usual to the Feshbach-Villars representation."""
    e = energy(p, mass, c)
    mc2 = mass * c * c
    norm = 2.0 * np.sqrt(mc2 * e)
    return _matrix_field([((e + mc2) / norm, DELTA), ((e - mc2) / norm, TAU1)], np.shape(e))


def U_inverse(p, mass=1.0, c=1.0):
    e = energy(p, mass, c)
    mc2 = mass * c * c
    norm = 2.0 * np.sqrt(mc2 * e)
    return _matrix_field([((e + mc2) / norm, DELTA), (-(e - mc2) / norm, TAU1)], np.shape(e))


@dataclass(frozen=True)
class Kinematics:
    """Kinematic tables bound to one grid."""

    grid: PhaseSpaceGrid

    @property
    def mass(self):
        return self.grid.mass

    @property
    def c(self):
        return self.grid.c

    def E(self, p):
        return energy(p, self.mass, self.c)

    def dE(self, p):
        return energy_derivative(p, self.mass, self.c)

    @property
    def E_nodes(self) -> np.ndarray:
        return energy(self.grid.p, self.mass, self.c)

    def staggered(self):
        """Momenta ``p_k +- m dp / 2`` on the mixed ``(p, P)`` lattice, shape ``(n, n)``."""
        g = self.grid
        half = 0.5 * g.P[None, :]
        return g.p[:, None] + half, g.p[:, None] - half

    def staggered_epsilon_chi(self):
        p_plus, p_minus = self.staggered()
        return epsilon_chi(p_plus, p_minus, self.mass, self.c)

    def staggered_energies(self):
        p_plus, p_minus = self.staggered()
        return self.E(p_plus), self.E(p_minus)

    def node_pairs(self):
        """``(p1, p2)`` on the node-by-node kernel lattice, shape ``(n, n)``."""
        p = self.grid.p
        return p[:, None], p[None, :]
