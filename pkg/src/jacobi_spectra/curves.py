"""Catalog of complex curves in the model ambients, with closed-form geometry.

Every catalog curve is given by an explicit holomorphic parameterization and
carries closed-form expressions for the induced conformal factor, the tangent
and normal connection potentials in the chart, and the two curvature fields.
Conventions (fixed once, validated by the Gauss-Bonnet and degree tests):

* induced metric ``e^{2u}|dz|^2``;
* tangent potential ``tau = -i u_z`` (the dz-coefficient of the tangent
  connection form), so the intrinsic curvature is ``R1212 = -4 u_{z zbar}
  e^{-2u}``;
* normal potential ``alpha = -(i/2) d_z log H_N`` where ``H_N`` is the squared
  Hermitian norm of a holomorphic normal frame, so the normal curvature is
  ``R1234 = -2 (log H_N)_{z zbar} e^{-2u}`` and ``(1/2pi) int R1234 dA`` is the
  normal bundle degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from .ambient import AmbientKind, AmbientSpace, build_ambient, _lattice_area
from .errors import ChartOverflow, UsageError

SAFE_CHART_RADIUS = 1.0e8


class CurveName(str, Enum):
    Line_CP2 = "Line_CP2"
    Conic_CP2 = "Conic_CP2"
    FactorSphere = "FactorSphere"
    Diagonal_Product = "Diagonal_Product"
    FlatSubtorus = "FlatSubtorus"


class Chart(str, Enum):
    SphereStereographic = "SphereStereographic"
    TorusFundamentalDomain = "TorusFundamentalDomain"


@dataclass(frozen=True)
class CurveSpec:
    """A catalog curve: name, ambient model, genus, and chart convention."""

    name: CurveName
    ambient: AmbientSpace
    genus: int
    chart: Chart


def _guard_chart(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > SAFE_CHART_RADIUS):
        raise ChartOverflow(
            f"chart coordinate exceeds safe radius {SAFE_CHART_RADIUS:g}; "
            "switch to the complementary chart"
        )
    return z


class CurveFields:
    """Closed-form geometric fields of one catalog curve.

    Subclasses implement the vectorized evaluators; all return arrays shaped
    like the input chart coordinate ``z``.
    """

    name: CurveName
    chart = Chart.SphereStereographic
    genus = 0
    deg_normal = 0  # a-priori topological degree, re-derived numerically later

    def __init__(self, ambient: AmbientSpace):
        self.ambient = ambient

    # embedding and frames ---------------------------------------------------
    def embed(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def tangent_hol(self, z: np.ndarray) -> np.ndarray:
        """Holomorphic tangent field d(zeta)/dz, shape (..., 2)."""
        raise NotImplementedError

    def normal_hol(self, z: np.ndarray) -> np.ndarray:
        """A nowhere-zero holomorphic section of the normal quotient, (..., 2)."""
        raise NotImplementedError

    # scalar fields ----------------------------------------------------------
    def e2u(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def tau(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def alpha(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def R1212(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def R1234(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def ric_ee(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # unitary adapted frame ----------------------------------------------------
    def frames(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Unit (1,0) tangent and normal frames (e1, e0) in ambient chart coords."""
        z = _guard_chart(z)
        zeta = self.embed(z)
        h = self.ambient.hermitian_metric(zeta)
        T = self.tangent_hol(z)
        W = self.normal_hol(z)

        def pair(u: np.ndarray, v: np.ndarray) -> np.ndarray:
            return np.einsum("...i,...ij,...j->...", u, h, np.conj(v))

        e1 = T / np.sqrt(pair(T, T).real)[..., None]
        Wp = W - (pair(W, T) / pair(T, T))[..., None] * T
        e0 = Wp / np.sqrt(pair(Wp, Wp).real)[..., None]
        return e1, e0


class _LineCP2(CurveFields):
    """The projective line z -> [1 : z : 0] in CP^2."""

    name = CurveName.Line_CP2
    deg_normal = 1

    def __init__(self, ambient: AmbientSpace):
        super().__init__(ambient)
        self.sigma = 4.0 / ambient.c0

    def embed(self, z):
        z = _guard_chart(z)
        return np.stack([z, np.zeros_like(z)], axis=-1)

    def tangent_hol(self, z):
        z = np.asarray(z, dtype=complex)
        return np.stack([np.ones_like(z), np.zeros_like(z)], axis=-1)

    def normal_hol(self, z):
        z = np.asarray(z, dtype=complex)
        return np.stack([np.zeros_like(z), np.ones_like(z)], axis=-1)

    def e2u(self, z):
        z = _guard_chart(z)
        r2 = (z * np.conj(z)).real
        return self.sigma / (1.0 + r2) ** 2

    def tau(self, z):
        z = _guard_chart(z)
        return 1j * np.conj(z) / (1.0 + (z * np.conj(z)).real)

    def alpha(self, z):
        z = _guard_chart(z)
        return 0.5j * np.conj(z) / (1.0 + (z * np.conj(z)).real)

    def R1212(self, z):
        return np.full(np.shape(z), self.ambient.c0)

    def R1234(self, z):
        return np.full(np.shape(z), 0.5 * self.ambient.c0)

    def ric_ee(self, z):
        return np.full(np.shape(z), 0.75 * self.ambient.c0)


class _ConicCP2(CurveFields):
    """The smooth conic z -> [1 : z : z^2] in CP^2 (a non-round round sphere)."""

    name = CurveName.Conic_CP2
    deg_normal = 4

    def __init__(self, ambient: AmbientSpace):
        super().__init__(ambient)
        self.sigma = 4.0 / ambient.c0

    @staticmethod
    def _SQ(r2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        S = 1.0 + r2 + r2**2
        Q = 1.0 + 4.0 * r2 + r2**2
        return S, Q

    def embed(self, z):
        z = _guard_chart(z)
        return np.stack([z, z * z], axis=-1)

    def tangent_hol(self, z):
        z = np.asarray(z, dtype=complex)
        return np.stack([np.ones_like(z), 2.0 * z], axis=-1)

    def normal_hol(self, z):
        z = np.asarray(z, dtype=complex)
        return np.stack([np.zeros_like(z), np.ones_like(z)], axis=-1)

    def e2u(self, z):
        z = _guard_chart(z)
        r2 = (z * np.conj(z)).real
        S, Q = self._SQ(r2)
        return self.sigma * Q / S**2

    def tau(self, z):
        z = _guard_chart(z)
        zb = np.conj(z)
        r2 = (z * zb).real
        S, Q = self._SQ(r2)
        u_z = zb * (2.0 + r2) / Q - zb * (1.0 + 2.0 * r2) / S
        return -1j * u_z

    def alpha(self, z):
        z = _guard_chart(z)
        zb = np.conj(z)
        r2 = (z * zb).real
        S, Q = self._SQ(r2)
        return 0.5j * (zb * (1.0 + 2.0 * r2) / S + 2.0 * zb * (2.0 + r2) / Q)

    def _log_laplacians(self, r2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        S, Q = self._SQ(r2)
        logS_zzb = (1.0 + 4.0 * r2) / S - r2 * (1.0 + 2.0 * r2) ** 2 / S**2
        logQ_zzb = 4.0 * (1.0 + r2) / Q - 4.0 * r2 * (2.0 + r2) ** 2 / Q**2
        return logS_zzb, logQ_zzb

    def R1212(self, z):
        z = _guard_chart(z)
        r2 = (z * np.conj(z)).real
        logS_zzb, logQ_zzb = self._log_laplacians(r2)
        u_zzb = 0.5 * logQ_zzb - logS_zzb
        return -4.0 * u_zzb / self.e2u(z)

    def R1234(self, z):
        z = _guard_chart(z)
        r2 = (z * np.conj(z)).real
        logS_zzb, logQ_zzb = self._log_laplacians(r2)
        return 2.0 * (logS_zzb + logQ_zzb) / self.e2u(z)

    def ric_ee(self, z):
        return np.full(np.shape(z), 0.75 * self.ambient.c0)


class _FactorSphere(CurveFields):
    """The first factor z -> (z, p0) of a product of round spheres."""

    name = CurveName.FactorSphere
    deg_normal = 0

    def embed(self, z):
        z = _guard_chart(z)
        return np.stack([z, np.zeros_like(z)], axis=-1)

    def tangent_hol(self, z):
        z = np.asarray(z, dtype=complex)
        return np.stack([np.ones_like(z), np.zeros_like(z)], axis=-1)

    def normal_hol(self, z):
        z = np.asarray(z, dtype=complex)
        return np.stack([np.zeros_like(z), np.ones_like(z)], axis=-1)

    def e2u(self, z):
        z = _guard_chart(z)
        r2 = (z * np.conj(z)).real
        return (4.0 / self.ambient.K1) / (1.0 + r2) ** 2

    def tau(self, z):
        z = _guard_chart(z)
        return 1j * np.conj(z) / (1.0 + (z * np.conj(z)).real)

    def alpha(self, z):
        return np.zeros(np.shape(z), dtype=complex)

    def R1212(self, z):
        return np.full(np.shape(z), self.ambient.K1)

    def R1234(self, z):
        return np.zeros(np.shape(z))

    def ric_ee(self, z):
        return np.full(np.shape(z), 0.5 * self.ambient.K1)


class _DiagonalProduct(CurveFields):
    """The diagonal-type curve z -> (z, z) in a product of round spheres."""

    name = CurveName.Diagonal_Product
    deg_normal = 2

    def __init__(self, ambient: AmbientSpace):
        super().__init__(ambient)
        K1, K2 = ambient.K1, ambient.K2
        self.kappa = K1 * K2 / (K1 + K2)

    def embed(self, z):
        z = _guard_chart(z)
        return np.stack([z, z], axis=-1)

    def tangent_hol(self, z):
        z = np.asarray(z, dtype=complex)
        one = np.ones_like(z)
        return np.stack([one, one], axis=-1)

    def normal_hol(self, z):
        z = np.asarray(z, dtype=complex)
        one = np.ones_like(z)
        return np.stack([self.ambient.K1 * one, -self.ambient.K2 * one], axis=-1)

    def e2u(self, z):
        z = _guard_chart(z)
        r2 = (z * np.conj(z)).real
        return (4.0 / self.kappa) / (1.0 + r2) ** 2

    def tau(self, z):
        z = _guard_chart(z)
        return 1j * np.conj(z) / (1.0 + (z * np.conj(z)).real)

    def alpha(self, z):
        z = _guard_chart(z)
        return 1j * np.conj(z) / (1.0 + (z * np.conj(z)).real)

    def R1212(self, z):
        return np.full(np.shape(z), self.kappa)

    def R1234(self, z):
        return np.full(np.shape(z), self.kappa)

    def ric_ee(self, z):
        return np.full(np.shape(z), self.kappa)


class _FlatSubtorus(CurveFields):
    """The flat subtorus w -> (w, 0) of C^2 / (Lambda1 x Lambda2)."""

    name = CurveName.FlatSubtorus
    chart = Chart.TorusFundamentalDomain
    genus = 1
    deg_normal = 0

    def embed(self, z):
        z = _guard_chart(z)
        return np.stack([z, np.zeros_like(z)], axis=-1)

    def tangent_hol(self, z):
        z = np.asarray(z, dtype=complex)
        return np.stack([np.ones_like(z), np.zeros_like(z)], axis=-1)

    def normal_hol(self, z):
        z = np.asarray(z, dtype=complex)
        return np.stack([np.zeros_like(z), np.ones_like(z)], axis=-1)

    def e2u(self, z):
        return np.ones(np.shape(z))

    def tau(self, z):
        return np.zeros(np.shape(z), dtype=complex)

    def alpha(self, z):
        return np.zeros(np.shape(z), dtype=complex)

    def R1212(self, z):
        return np.zeros(np.shape(z))

    def R1234(self, z):
        return np.zeros(np.shape(z))

    def ric_ee(self, z):
        return np.zeros(np.shape(z))

    @property
    def lattice(self) -> tuple[complex, complex]:
        return self.ambient.lattice1

    @property
    def lattice_area(self) -> float:
        w1, w2 = self.lattice
        return _lattice_area(w1, w2)


_CATALOG: dict[CurveName, tuple[type[CurveFields], AmbientKind]] = {
    CurveName.Line_CP2: (_LineCP2, AmbientKind.CP2_FubiniStudy),
    CurveName.Conic_CP2: (_ConicCP2, AmbientKind.CP2_FubiniStudy),
    CurveName.FactorSphere: (_FactorSphere, AmbientKind.ProductOfSpheres),
    CurveName.Diagonal_Product: (_DiagonalProduct, AmbientKind.ProductOfSpheres),
    CurveName.FlatSubtorus: (_FlatSubtorus, AmbientKind.FlatTorus4),
}

#: CLI-friendly aliases for catalog names (case-insensitive lookup below).
CURVE_ALIASES: dict[str, tuple[CurveName, dict[str, Any]]] = {
    "line": (CurveName.Line_CP2, {}),
    "line_cp2": (CurveName.Line_CP2, {}),
    "conic": (CurveName.Conic_CP2, {}),
    "conic_cp2": (CurveName.Conic_CP2, {}),
    "factorsphere": (CurveName.FactorSphere, {}),
    "factor": (CurveName.FactorSphere, {}),
    "factorsphere_mixed": (CurveName.FactorSphere, {"K1": 2.0, "K2": 1.0}),
    "diagonal_product": (CurveName.Diagonal_Product, {}),
    "diagonal": (CurveName.Diagonal_Product, {}),
    "flatsubtorus": (CurveName.FlatSubtorus, {}),
    "torus": (CurveName.FlatSubtorus, {}),
}


def catalog_names() -> list[str]:
    """Canonical catalog curve names, in declaration order."""
    return [n.value for n in CurveName]


def resolve_curve_name(name: str) -> tuple[CurveName, dict[str, Any]]:
    """Resolve a user-facing curve name (or alias) to (CurveName, ambient params)."""
    key = str(name).strip().lower()
    if key in CURVE_ALIASES:
        return CURVE_ALIASES[key]
    raise UsageError(
        f"unknown curve {name!r}; available: "
        + ", ".join(n.value for n in CurveName)
        + " (plus alias FactorSphere_Mixed)"
    )


def catalog_spec(name: CurveName | str, **ambient_params: Any) -> CurveSpec:
    """Build the CurveSpec for a catalog curve, with optional ambient parameters."""
    if isinstance(name, str) and name not in CurveName._value2member_map_:
        resolved, extra = resolve_curve_name(name)
        merged = {**extra, **ambient_params}
        return catalog_spec(resolved, **merged)
    name = CurveName(name)
    fields_cls, ambient_kind = _CATALOG[name]
    ambient = build_ambient(ambient_kind, ambient_params or None)
    return CurveSpec(
        name=name,
        ambient=ambient,
        genus=fields_cls.genus,
        chart=fields_cls.chart,
    )


def fields_for(spec: CurveSpec) -> CurveFields:
    """Instantiate the closed-form field evaluators for ``spec``."""
    fields_cls, ambient_kind = _CATALOG[spec.name]
    if spec.ambient.kind is not ambient_kind:
        raise UsageError(f"{spec.name.value} lives in {ambient_kind.value}, not {spec.ambient.kind.value}")
    return fields_cls(spec.ambient)
