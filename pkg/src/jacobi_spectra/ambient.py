"""Model ambient Kahler surfaces: CP^2, products of round spheres, flat torus.

Each ambient carries its Einstein constant (when the metric is Einstein) and
the infimum of its Ricci curvature over unit tangents, plus enough pointwise
metric data (Hermitian metric and Christoffel symbols in the standard affine
charts) for frame transport and for the finite-difference cross-checks in the
test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .errors import DegenerateLattice, NonPositiveCurvature, UsageError


class AmbientKind(str, Enum):
    CP2_FubiniStudy = "CP2_FubiniStudy"
    ProductOfSpheres = "ProductOfSpheres"
    FlatTorus4 = "FlatTorus4"


def _lattice_area(omega1: complex, omega2: complex) -> float:
    """Oriented area of the fundamental domain of the lattice (omega1, omega2)."""
    return float(np.imag(np.conj(omega1) * omega2))


@dataclass(frozen=True)
class AmbientSpace:
    """A model Kahler surface with its curvature constants.

    Parameters are per-kind scalars: ``c0`` (holomorphic sectional curvature)
    for CP^2, ``K1``/``K2`` (factor Gauss curvatures) for the sphere product,
    and two planar lattice bases ``lattice1``/``lattice2`` for the flat torus
    C^2 / (Lambda1 x Lambda2).
    """

    kind: AmbientKind
    parameters: dict[str, Any] = field(default_factory=dict)
    einstein_constant: float | None = None
    ricci_infimum: float = 0.0

    # -- parameter accessors -------------------------------------------------
    @property
    def c0(self) -> float:
        return float(self.parameters["c0"])

    @property
    def K1(self) -> float:
        return float(self.parameters["K1"])

    @property
    def K2(self) -> float:
        return float(self.parameters["K2"])

    @property
    def lattice1(self) -> tuple[complex, complex]:
        w1, w2 = self.parameters["lattice1"]
        return complex(w1), complex(w2)

    @property
    def lattice2(self) -> tuple[complex, complex]:
        w1, w2 = self.parameters["lattice2"]
        return complex(w1), complex(w2)

    @property
    def is_einstein(self) -> bool:
        return self.einstein_constant is not None

    def describe(self) -> str:
        if self.kind is AmbientKind.CP2_FubiniStudy:
            return f"CP2 c0={self.c0:g}"
        if self.kind is AmbientKind.ProductOfSpheres:
            return f"S2xS2 K1={self.K1:g} K2={self.K2:g}"
        return "T4 C^2/Lambda"

    # -- pointwise metric data (affine charts) -------------------------------
    def hermitian_metric(self, zeta: np.ndarray) -> np.ndarray:
        """Hermitian metric h_{i jbar} at chart points ``zeta`` (shape (..., 2)).

        Returns an array of shape (..., 2, 2) with h[i, j] = h(d/dzeta_i,
        conj(d/dzeta_j)).  Conventions: CP^2 uses the affine Fubini--Study
        chart scaled so the holomorphic sectional curvature is ``c0``; the
        sphere product uses a stereographic chart per factor; the torus is the
        flat identity metric.
        """
        zeta = np.asarray(zeta, dtype=complex)
        shape = zeta.shape[:-1]
        h = np.zeros(shape + (2, 2), dtype=complex)
        if self.kind is AmbientKind.CP2_FubiniStudy:
            sigma = 4.0 / self.c0
            s = 1.0 + np.sum(zeta * np.conj(zeta), axis=-1).real
            for i in range(2):
                for j in range(2):
                    h[..., i, j] = -np.conj(zeta[..., i]) * zeta[..., j]
                    if i == j:
                        h[..., i, j] += s
            h *= (sigma / s**2)[..., None, None]
        elif self.kind is AmbientKind.ProductOfSpheres:
            for i, K in enumerate((self.K1, self.K2)):
                r2 = (zeta[..., i] * np.conj(zeta[..., i])).real
                h[..., i, i] = (4.0 / K) / (1.0 + r2) ** 2
        else:
            h[..., 0, 0] = 1.0
            h[..., 1, 1] = 1.0
        return h

    def christoffel(self, zeta: np.ndarray) -> np.ndarray:
        """Holomorphic Christoffel symbols Gamma^i_{jk} at ``zeta`` (..., 2, 2, 2)."""
        zeta = np.asarray(zeta, dtype=complex)
        shape = zeta.shape[:-1]
        g = np.zeros(shape + (2, 2, 2), dtype=complex)
        if self.kind is AmbientKind.CP2_FubiniStudy:
            s = 1.0 + np.sum(zeta * np.conj(zeta), axis=-1).real
            zb = np.conj(zeta)
            for i in range(2):
                for j in range(2):
                    for k in range(2):
                        val = 0.0
                        if i == j:
                            val = val + zb[..., k]
                        if i == k:
                            val = val + zb[..., j]
                        g[..., i, j, k] = -val / s
        elif self.kind is AmbientKind.ProductOfSpheres:
            for i in range(2):
                r2 = (zeta[..., i] * np.conj(zeta[..., i])).real
                g[..., i, i, i] = -2.0 * np.conj(zeta[..., i]) / (1.0 + r2)
        return g


def build_ambient(kind: AmbientKind | str, parameters: dict[str, Any] | None = None) -> AmbientSpace:
    """Construct a model ambient with populated curvature constants.

    Raises
    ------
    NonPositiveCurvature
        For non-positive curvature parameters on CP^2 or sphere factors.
    DegenerateLattice
        For a rank-deficient (or negatively oriented) torus lattice.
    """
    kind = AmbientKind(kind)
    params = dict(parameters or {})
    if kind is AmbientKind.CP2_FubiniStudy:
        c0 = float(params.setdefault("c0", 4.0))
        if c0 <= 0.0:
            raise NonPositiveCurvature(f"CP2 needs c0 > 0, got {c0}")
        c = 1.5 * c0
        return AmbientSpace(kind, params, einstein_constant=c, ricci_infimum=c)
    if kind is AmbientKind.ProductOfSpheres:
        K1 = float(params.setdefault("K1", 1.0))
        K2 = float(params.setdefault("K2", 1.0))
        if K1 <= 0.0 or K2 <= 0.0:
            raise NonPositiveCurvature(f"sphere factors need K > 0, got K1={K1}, K2={K2}")
        c = K1 if K1 == K2 else None
        return AmbientSpace(kind, params, einstein_constant=c, ricci_infimum=min(K1, K2))
    if kind is AmbientKind.FlatTorus4:
        params.setdefault("lattice1", (1.0 + 0.0j, 1.0j))
        params.setdefault("lattice2", (1.0 + 0.0j, 1.0j))
        for key in ("lattice1", "lattice2"):
            w1, w2 = (complex(w) for w in params[key])
            if _lattice_area(w1, w2) <= 1e-12:
                raise DegenerateLattice(
                    f"{key} basis ({w1}, {w2}) spans no positively oriented fundamental domain"
                )
        return AmbientSpace(kind, params, einstein_constant=0.0, ricci_infimum=0.0)
    raise UsageError(f"unknown ambient kind {kind!r}")
