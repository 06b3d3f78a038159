"""Discrete geometry of catalog curves: grids, fields, invariants.

``build_geometry`` evaluates the closed-form fields of a catalog curve on a
quadrature grid (Gauss-Legendre x uniform azimuth on genus-0 charts, uniform
on the torus fundamental domain), checks the curvature bookkeeping, and
packages everything into an immutable :class:`CurveGeometry`.

The genus-0 backend also stores the curve's *round reference*: the constant
curvature metric of the same area and the reference normal connection of the
same degree.  Actual operators are later assembled as exact ladder operators
of the reference plus multiplication by the (closed-form) differences.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Callable

import numpy as np
from scipy.special import roots_legendre

from .ambient import AmbientKind, AmbientSpace
from .curves import (
    Chart,
    CurveFields,
    CurveName,
    CurveSpec,
    catalog_spec,
    fields_for,
)
from .errors import (
    FrameDiscontinuity,
    NonIntegralChernNumber,
    UnsupportedGenus,
    UsageError,
)

#: default tolerance for pointwise geometric identities on closed-form data
TOL_GEOM = 1.0e-6
#: tolerance for curvature integrals landing on integers
CHERN_TOL = 1.0e-3
#: maximum allowed gauge phase increment between finite-difference samples
PHASE_JUMP_TOL = 0.5

_DEFAULT_MAX_LEVEL = {
    CurveName.Line_CP2: 24,
    CurveName.Conic_CP2: 40,
    CurveName.FactorSphere: 24,
    CurveName.Diagonal_Product: 24,
    CurveName.FlatSubtorus: 12,
}

#: spectral headroom the engine must keep above any assembly cutoff
_DEFAULT_MARGIN = {
    CurveName.Line_CP2: 0,
    CurveName.Conic_CP2: 18,
    CurveName.FactorSphere: 0,
    CurveName.Diagonal_Product: 0,
    CurveName.FlatSubtorus: 0,
}


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Quadrature nodes in the chart with flat-chart measure weights.

    ``weights`` integrate smooth functions against the chart's coordinate
    measure ``dx dy``; multiplying by the induced area density ``e^{2u}``
    yields quadrature against the induced area form (that product is stored
    on the geometry as ``area_weights``).
    """

    nodes: np.ndarray  # complex chart coordinates, shape (n1, n2)
    weights: np.ndarray  # positive reals, shape (n1, n2)
    resolution: tuple[int, int]
    chart: Chart
    # genus-0 extras (None on the torus)
    x: np.ndarray | None = None  # Gauss-Legendre nodes, cos(theta)
    x_weights: np.ndarray | None = None
    theta: np.ndarray | None = None
    phi: np.ndarray | None = None
    # torus extras
    lattice: tuple[complex, complex] | None = None


@dataclass(frozen=True, eq=False)
class CurveGeometry:
    """Discrete geometric data of one catalog curve (treat as immutable)."""

    spec: CurveSpec
    grid: QuadratureGrid
    u: np.ndarray
    tau: np.ndarray
    alpha: np.ndarray
    R1212: np.ndarray
    R1234: np.ndarray
    ric_ee: np.ndarray
    area: float
    deg_normal: int
    euler_char: int
    # derived/auxiliary data -------------------------------------------------
    e2u: np.ndarray = None
    area_weights: np.ndarray = None
    chern_residuals: tuple[float, float] = (0.0, 0.0)
    # round-reference data (genus 0); zeros on the torus backend
    ref_curvature: float = 0.0
    rho: np.ndarray = None
    delta_tau: np.ndarray = None
    delta_alpha: np.ndarray = None
    max_level: int = 16
    engine_margin: int = 0
    regauged: bool = False

    def __post_init__(self):
        object.__setattr__(self, "_engine", None)

    # -- basic queries --------------------------------------------------------
    @property
    def name(self) -> str:
        return self.spec.name.value

    @property
    def ambient(self) -> AmbientSpace:
        return self.spec.ambient

    @property
    def genus(self) -> int:
        return self.spec.genus

    @property
    def is_sphere(self) -> bool:
        return self.spec.chart is Chart.SphereStereographic

    def integrate(self, field: np.ndarray) -> complex | float:
        """Integrate a node field against the induced area form."""
        total = np.sum(field * self.area_weights)
        return float(total) if np.isrealobj(field) else complex(total)

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        """L^2 pairing <f, g> = int f conj(g) dA."""
        return complex(np.sum(f * np.conj(g) * self.area_weights))

    def balance_residual(self) -> float:
        """Max-node defect of the intrinsic+normal vs ambient curvature balance."""
        return float(np.max(np.abs(self.R1212 + self.R1234 - 2.0 * self.ric_ee)))

    def einstein_deviation(self) -> float | None:
        """Max-node |ric_ee - c/2| on Einstein ambients, else None."""
        c = self.ambient.einstein_constant
        if c is None:
            return None
        return float(np.max(np.abs(self.ric_ee - 0.5 * c)))

    def max_cutoff(self) -> int:
        return self.max_level - self.engine_margin

    # -- engine ---------------------------------------------------------------
    def engine(self):
        """Lazily build (and cache) the spectral engine for this geometry."""
        if self._engine is None:
            from . import engines

            if self.is_sphere:
                eng = engines.SphereEngine(self)
            else:
                eng = engines.TorusEngine(self)
            object.__setattr__(self, "_engine", eng)
        return self._engine

    # -- gauge rotation ---------------------------------------------------------
    def with_regauge(self, chi: np.ndarray, chi_z: np.ndarray) -> "CurveGeometry":
        """Rotate the normal frame phase by a smooth real function.

        ``chi`` are node values of the phase, ``chi_z`` its chart d/dz
        derivative.  The connection potential shifts by ``chi_z``; curvatures
        and all reported spectra are unchanged (gauge covariance is one of the
        invariance tests).
        """
        chi = np.asarray(chi)
        if np.iscomplexobj(chi):
            if np.max(np.abs(chi.imag)) > 1e-12 * (1.0 + np.max(np.abs(chi.real))):
                raise UsageError("the gauge phase chi must be real-valued")
            chi = chi.real
        chi = np.asarray(chi, dtype=float)
        chi_z = np.asarray(chi_z, dtype=complex)
        if chi.shape != self.u.shape or chi_z.shape != self.u.shape:
            raise UsageError("chi and chi_z must be node fields on the geometry grid")
        new = replace(
            self,
            alpha=self.alpha + chi_z,
            delta_alpha=self.delta_alpha + chi_z,
            engine_margin=max(self.engine_margin, 8),
            regauged=True,
        )
        return new

    # -- serialization ----------------------------------------------------------
    def to_json_dict(self) -> dict[str, Any]:
        def flat(arr, as_complex=False):
            a = np.asarray(arr).ravel()
            if as_complex:
                return {"re": a.real.tolist(), "im": a.imag.tolist()}
            return a.real.tolist()

        return {
            "curve": self.name,
            "ambient": self.ambient.describe(),
            "genus": self.genus,
            "chart": self.spec.chart.value,
            "resolution": list(self.grid.resolution),
            "nodes": flat(self.grid.nodes, as_complex=True),
            "weights": flat(self.grid.weights),
            "area_weights": flat(self.area_weights),
            "u": flat(self.u),
            "tau": flat(self.tau, as_complex=True),
            "alpha": flat(self.alpha, as_complex=True),
            "R1212": flat(self.R1212),
            "R1234": flat(self.R1234),
            "ric_ee": flat(self.ric_ee),
            "area": self.area,
            "deg_normal": self.deg_normal,
            "euler_char": self.euler_char,
            "einstein_constant": self.ambient.einstein_constant,
            "ricci_infimum": self.ambient.ricci_infimum,
            "residuals": {
                "gauss_ricci_balance": self.balance_residual(),
                "chern_euler": self.chern_residuals[0],
                "chern_normal": self.chern_residuals[1],
                "einstein_deviation": self.einstein_deviation(),
            },
        }


# ---------------------------------------------------------------------------
# grid construction
# ---------------------------------------------------------------------------

def _sphere_grid(n_theta: int, n_phi: int) -> QuadratureGrid:
    x, wx = roots_legendre(n_theta)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    r = np.sqrt((1.0 - x) / (1.0 + x))  # tan(theta/2)
    z = r[:, None] * np.exp(1j * phi)[None, :]
    # flat chart measure dx dy = (1+r^2)^2/4 * dm(x) * dphi on the z-chart
    w = ((1.0 + r**2) ** 2 / 4.0 * wx)[:, None] * np.full(n_phi, 2.0 * np.pi / n_phi)[None, :]
    return QuadratureGrid(
        nodes=z,
        weights=w,
        resolution=(n_theta, n_phi),
        chart=Chart.SphereStereographic,
        x=x,
        x_weights=wx,
        theta=theta,
        phi=phi,
    )


def _torus_grid(n: int, lattice: tuple[complex, complex]) -> QuadratureGrid:
    w1, w2 = lattice
    s = np.arange(n) / n
    t = np.arange(n) / n
    z = s[:, None] * w1 + t[None, :] * w2
    cell = float(np.imag(np.conj(w1) * w2)) / n**2
    w = np.full((n, n), cell)
    return QuadratureGrid(
        nodes=z,
        weights=w,
        resolution=(n, n),
        chart=Chart.TorusFundamentalDomain,
        lattice=lattice,
    )


# ---------------------------------------------------------------------------
# spec-level operations
# ---------------------------------------------------------------------------

def pullback_metric(spec: CurveSpec, z: np.ndarray) -> np.ndarray:
    """Conformal factor u(z) of the induced metric e^{2u}|dz|^2 at chart points."""
    flds = fields_for(spec)
    return 0.5 * np.log(flds.e2u(z))


def adapted_frame(spec: CurveSpec, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit (1,0) tangent and normal frames (e1, e0) at chart points."""
    return fields_for(spec).frames(z)


def normal_connection(
    spec: CurveSpec,
    grid: np.ndarray | QuadratureGrid,
    method: str = "analytic",
    gauge: Callable[[np.ndarray], np.ndarray] | None = None,
    fd_step: float = 1.0e-4,
) -> np.ndarray:
    """Chart potential ``alpha`` of the normal connection form at grid nodes.

    ``method='analytic'`` evaluates the closed form.  ``method='fd'``
    transports the closed-form unitary normal frame and differences it
    (second-order centered), raising :class:`FrameDiscontinuity` when the
    frame gauge jumps between samples faster than a smooth gauge allows.
    ``gauge`` optionally multiplies the frame by a unit complex field (used
    to exercise gauge covariance and the discontinuity guard).
    """
    z = grid.nodes if isinstance(grid, QuadratureGrid) else np.asarray(grid, dtype=complex)
    flds = fields_for(spec)
    if method == "analytic":
        if gauge is not None:
            raise UsageError("gauge injection is only meaningful for the fd method")
        return flds.alpha(z)
    if method != "fd":
        raise UsageError(f"unknown normal_connection method {method!r}")

    ambient = spec.ambient

    def frame0(pts: np.ndarray) -> np.ndarray:
        _, e0 = flds.frames(pts)
        if gauge is not None:
            e0 = e0 * np.asarray(gauge(pts))[..., None]
        return e0

    def pair_at(pts: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        h = ambient.hermitian_metric(flds.embed(pts))
        return np.einsum("...i,...ij,...j->...", u, h, np.conj(v))

    e0c = frame0(z)
    shifts = [fd_step, -fd_step, 1j * fd_step, -1j * fd_step]
    samples = []
    for dz in shifts:
        pts = z + dz
        e0s = frame0(pts)
        overlap = pair_at(pts, e0s, e0c)
        jump = np.abs(np.angle(overlap))
        if np.any(jump > PHASE_JUMP_TOL):
            raise FrameDiscontinuity(
                f"normal frame phase jumps by up to {float(np.max(jump)):.3f} rad "
                f"across a step of {fd_step:g}; smooth the gauge per chart first"
            )
        samples.append(e0s)
    d_e0 = (samples[0] - samples[1] - 1j * (samples[2] - samples[3])) / (4.0 * fd_step)
    gamma = ambient.christoffel(flds.embed(z))
    T = flds.tangent_hol(z)
    nabla = d_e0 + np.einsum("...ijk,...j,...k->...i", gamma, T, e0c)
    return -1j * pair_at(z, nabla, e0c)


def curvatures(geometry: CurveGeometry) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Re-evaluate (R1212, R1234, ric_ee) on the geometry's grid.

    R1212 comes from the conformal factor, R1234 from the derivative of the
    normal potential, and ric_ee from the ambient Ricci tensor contracted
    with the adapted frame -- three independent routes, so the curvature
    balance stays a genuine test.
    """
    flds = fields_for(geometry.spec)
    z = geometry.grid.nodes
    return flds.R1212(z), flds.R1234(z), flds.ric_ee(z)


def topological_invariants(geometry: CurveGeometry) -> tuple[int, int, float]:
    """(euler_char, deg_normal, area) from curvature integrals, with residual checks."""
    area = float(np.sum(geometry.area_weights))
    euler_raw = geometry.integrate(geometry.R1212) / (2.0 * np.pi)
    deg_raw = geometry.integrate(geometry.R1234) / (2.0 * np.pi)
    euler = int(np.rint(euler_raw))
    deg = int(np.rint(deg_raw))
    res_e = abs(euler_raw - euler)
    res_d = abs(deg_raw - deg)
    if max(res_e, res_d) > CHERN_TOL:
        raise NonIntegralChernNumber(
            f"curvature integrals off-integer by ({res_e:.2e}, {res_d:.2e}) "
            f"> {CHERN_TOL:g}; geometry construction is broken"
        )
    return euler, deg, area


def latitude_holonomies(geometry: CurveGeometry) -> np.ndarray:
    """Holonomy angle of the normal connection around each latitude circle."""
    if not geometry.is_sphere:
        raise UsageError("latitude holonomies are defined on the genus-0 chart")
    z = geometry.grid.nodes
    integrand = 2.0 * np.real(1j * geometry.alpha * z)
    return (2.0 * np.pi / geometry.grid.resolution[1]) * np.sum(integrand, axis=1)


def normal_winding_number(geometry: CurveGeometry) -> int:
    """Integer winding of the normal frame between the two chart poles.

    The change of the latitude holonomy from one pole to the other equals
    (by Stokes) minus the total normal curvature, i.e. -2*pi*deg; the
    returned integer must reproduce ``deg_normal``.
    """
    hol = latitude_holonomies(geometry)
    # theta decreases with the Gauss-Legendre index ordering (x ascending)
    delta = hol[0] - hol[-1] if geometry.grid.theta[0] > geometry.grid.theta[-1] else hol[-1] - hol[0]
    return int(np.rint(-delta / (2.0 * np.pi)))


# ---------------------------------------------------------------------------
# top-level constructor
# ---------------------------------------------------------------------------

def build_geometry(
    curve: CurveSpec | CurveName | str,
    max_level: int | None = None,
    resolution: tuple[int, int] | None = None,
    **ambient_params: Any,
) -> CurveGeometry:
    """Build the discrete geometry of a catalog curve.

    Parameters
    ----------
    curve : name, CurveName, or CurveSpec
    max_level : highest representable basis level of the spectral engine
        (defaults per curve; assembly cutoffs must stay below
        ``max_level - engine_margin``).
    resolution : optional grid override ``(n_theta, n_phi)`` / ``(n, n)``.
    """
    if isinstance(curve, CurveSpec):
        spec = curve
        if ambient_params:
            raise UsageError("pass ambient parameters through the curve name form")
    else:
        spec = catalog_spec(curve, **ambient_params)
    if spec.genus >= 2:
        raise UnsupportedGenus(f"genus {spec.genus} is outside the catalog (genus <= 1)")

    flds = fields_for(spec)
    lvl = int(max_level if max_level is not None else _DEFAULT_MAX_LEVEL[spec.name])
    if lvl < 2:
        raise UsageError("max_level must be at least 2")
    margin = _DEFAULT_MARGIN[spec.name]

    if spec.chart is Chart.SphereStereographic:
        d = flds.deg_normal
        d_max = d + 6  # largest spin parameter among carried weight classes
        extra = 16 if spec.name is CurveName.Conic_CP2 else 8
        if resolution is None:
            n_theta = lvl + d_max + extra
            n_phi = 2 * (lvl + d_max) + extra
        else:
            n_theta, n_phi = resolution
        grid = _sphere_grid(int(n_theta), int(n_phi))
    else:
        if resolution is None:
            n = 2 * lvl + 4
        else:
            n = int(resolution[0])
        grid = _torus_grid(n, flds.lattice)

    z = grid.nodes
    e2u = flds.e2u(z)
    u = 0.5 * np.log(e2u)
    tau = flds.tau(z)
    alpha = flds.alpha(z)
    R1212 = flds.R1212(z)
    R1234 = flds.R1234(z)
    ric_ee = flds.ric_ee(z)
    area_weights = grid.weights * e2u
    area = float(np.sum(area_weights))

    euler_raw = float(np.sum(R1212 * area_weights)) / (2.0 * np.pi)
    deg_raw = float(np.sum(R1234 * area_weights)) / (2.0 * np.pi)
    euler = int(np.rint(euler_raw))
    deg = int(np.rint(deg_raw))
    residuals = (abs(euler_raw - euler), abs(deg_raw - deg))
    if max(residuals) > CHERN_TOL:
        raise NonIntegralChernNumber(
            f"curvature integrals ({euler_raw:.6f}, {deg_raw:.6f}) miss integers "
            f"by more than {CHERN_TOL:g}"
        )
    if euler != 2 - 2 * spec.genus or deg != flds.deg_normal:
        raise NonIntegralChernNumber(
            f"curvature integrals give (chi, deg) = ({euler}, {deg}), expected "
            f"({2 - 2 * spec.genus}, {flds.deg_normal})"
        )

    if spec.chart is Chart.SphereStereographic:
        K_ref = _round_reference_curvature(spec, flds)
        r2 = (z * np.conj(z)).real
        u0 = 0.5 * np.log(4.0 / K_ref) - np.log1p(r2)
        rho = u - u0
        tau0 = 1j * np.conj(z) / (1.0 + r2)
        alpha0 = 0.5 * deg * 1j * np.conj(z) / (1.0 + r2)
        delta_tau = tau - tau0
        delta_alpha = alpha - alpha0
    else:
        K_ref = 0.0
        rho = np.zeros_like(u)
        delta_tau = np.zeros_like(tau)
        delta_alpha = np.zeros_like(alpha)

    return CurveGeometry(
        spec=spec,
        grid=grid,
        u=u,
        tau=tau,
        alpha=alpha,
        R1212=R1212,
        R1234=R1234,
        ric_ee=ric_ee,
        area=area,
        deg_normal=deg,
        euler_char=euler,
        e2u=e2u,
        area_weights=area_weights,
        chern_residuals=residuals,
        ref_curvature=K_ref,
        rho=rho,
        delta_tau=delta_tau,
        delta_alpha=delta_alpha,
        max_level=lvl,
        engine_margin=margin,
    )


def _round_reference_curvature(spec: CurveSpec, flds: CurveFields) -> float:
    """Exact curvature of the equal-area round reference metric."""
    if spec.name is CurveName.Line_CP2:
        return spec.ambient.c0
    if spec.name is CurveName.Conic_CP2:
        return 0.5 * spec.ambient.c0
    if spec.name is CurveName.FactorSphere:
        return spec.ambient.K1
    if spec.name is CurveName.Diagonal_Product:
        K1, K2 = spec.ambient.K1, spec.ambient.K2
        return K1 * K2 / (K1 + K2)
    raise UsageError(f"no round reference for {spec.name}")
