"""Weighted covariant calculus on discretized curves.

Sections of weight (p, q) couple with strength p to the tangent rotation
form and strength q to the normal rotation form.  The raising/lowering
derivatives return chart fields again (the conformal factor is divided
out), so iterated operators compose without re-weighting:

    d1bar: (p, q) -> (p+1, q)        d1: (p, q) -> (p-1, q)

A normal section nu has weight (0, 1).  The area Jacobi operator, the
second-variation quadratic forms, and the curvature commutation identity
are built from these two operators only, so the weight bookkeeping holds
by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotEinstein, UsageError, WeightMismatch
from .geometry import CurveGeometry

#: fixed pairing constant between the ambient-vector norm of a variation
#: field and the chart norm of its coefficient function (validated by the
#: requirement that the two Einstein-case energy identities coincide)
VNORM_PAIRING = 1.0


@dataclass(frozen=True, eq=False)
class WeightedSection:
    """Complex node field carrying its weight bookkeeping."""

    values: np.ndarray
    weight_p: int
    weight_q: int
    geometry: CurveGeometry

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.geometry.u.shape:
            raise UsageError(
                f"section values of shape {vals.shape} do not match the "
                f"grid {self.geometry.u.shape}"
            )
        object.__setattr__(self, "values", vals)

    @property
    def weight(self) -> tuple[int, int]:
        return (self.weight_p, self.weight_q)

    def norm_sq(self) -> float:
        """Squared L2 norm against the induced area form."""
        return float(np.real(self.geometry.integrate(np.abs(self.values) ** 2)))

    def __add__(self, other: "WeightedSection") -> "WeightedSection":
        _require_same_weight(self, other, "add")
        return WeightedSection(self.values + other.values, self.weight_p, self.weight_q, self.geometry)

    def __sub__(self, other: "WeightedSection") -> "WeightedSection":
        _require_same_weight(self, other, "subtract")
        return WeightedSection(self.values - other.values, self.weight_p, self.weight_q, self.geometry)

    def __mul__(self, scalar: complex) -> "WeightedSection":
        return WeightedSection(self.values * scalar, self.weight_p, self.weight_q, self.geometry)

    __rmul__ = __mul__


def normal_section(geometry: CurveGeometry, values: np.ndarray) -> WeightedSection:
    """Wrap node values as a weight-(0,1) normal section."""
    return WeightedSection(values, 0, 1, geometry)


def random_normal_section(
    geometry: CurveGeometry, seed: int | np.random.Generator, level: int | None = None
) -> WeightedSection:
    """Seeded band-limited random normal section (for identity testing)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if level is None:
        level = max(2, geometry.max_level // 2)
    vals = geometry.engine().random_section(0, 1, int(level), rng)
    return normal_section(geometry, vals)


def inner_product(f: WeightedSection, g: WeightedSection) -> complex:
    """L2 pairing <f, g> = int f conj(g) dA (same weight required)."""
    _require_same_weight(f, g, "pair")
    return f.geometry.inner(f.values, g.values)


def _require_same_weight(f: WeightedSection, g: WeightedSection, verb: str) -> None:
    if f.weight != g.weight:
        raise WeightMismatch(
            f"cannot {verb} sections of weights {f.weight} and {g.weight}"
        )
    if f.geometry is not g.geometry:
        raise UsageError("sections live on different geometries")


def _require_weight(s: WeightedSection, p: int, q: int, op: str) -> None:
    if s.weight != (p, q):
        raise WeightMismatch(f"{op} expects a weight-({p},{q}) section, got {s.weight}")


# ---------------------------------------------------------------------------
# first-order operators
# ---------------------------------------------------------------------------

def d1bar(s: WeightedSection) -> WeightedSection:
    """Raising covariant derivative; weight (p, q) -> (p+1, q)."""
    eng = s.geometry.engine()
    out = eng.apply_d1bar(s.values, s.weight_p, s.weight_q)
    return WeightedSection(out, s.weight_p + 1, s.weight_q, s.geometry)


def d1(s: WeightedSection) -> WeightedSection:
    """Lowering covariant derivative; weight (p, q) -> (p-1, q)."""
    eng = s.geometry.engine()
    out = eng.apply_d1(s.values, s.weight_p, s.weight_q)
    return WeightedSection(out, s.weight_p - 1, s.weight_q, s.geometry)


def jacobi_apply(nu: WeightedSection) -> WeightedSection:
    """Area Jacobi operator on normal sections (nonnegative, self-adjoint).

    Realized as the L2-positive composition -4*d1(d1bar(nu)): pairing with
    nu and integrating by parts gives 4*int |d1bar nu|^2 dA >= 0, the area
    second variation.  Holomorphic sections (d1bar nu = 0) are its kernel.
    """
    _require_weight(nu, 0, 1, "jacobi_apply")
    out = d1(d1bar(nu))
    return WeightedSection(-4.0 * out.values, 0, 1, nu.geometry)


# ---------------------------------------------------------------------------
# quadratic forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuadraticFormValue:
    """Value of a quadratic form with its pointwise integrand (diagnostics)."""

    value: float
    integrand_samples: np.ndarray


def second_variation_area(nu: WeightedSection) -> QuadraticFormValue:
    """Area second variation 4*int |d1bar nu|^2 dA."""
    _require_weight(nu, 0, 1, "second_variation_area")
    g = d1bar(nu)
    samples = 4.0 * np.abs(g.values) ** 2
    return QuadraticFormValue(float(nu.geometry.integrate(samples)), samples)


def second_variation_wplus(nu: WeightedSection) -> QuadraticFormValue:
    """Self-dual-curvature second variation 8*int |d1bar(d1bar nu)|^2 dA."""
    _require_weight(nu, 0, 1, "second_variation_wplus")
    g = d1bar(d1bar(nu))
    samples = 8.0 * np.abs(g.values) ** 2
    return QuadraticFormValue(float(nu.geometry.integrate(samples)), samples)


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def ricci_identity_residual(nu: WeightedSection) -> float:
    """Max-node defect of the second-order commutation identity.

    For f = d1bar(nu) (weight (1,1)) the two third-derivative routes differ
    by the curvature contraction on that weight class:

        d1(d1bar f) - d1bar(d1 f) = ric_ee * f,

    since half the intrinsic plus half the normal curvature is exactly the
    ambient Ricci contraction ric_ee.  Returns max |lhs - ric_ee*f|.
    """
    _require_weight(nu, 0, 1, "ricci_identity_residual")
    f = d1bar(nu)
    route_a = d1(d1bar(f))
    route_b = d1bar(d1(f))
    resid = route_a.values - route_b.values - nu.geometry.ric_ee * f.values
    return float(np.max(np.abs(resid)))


def wplus_identity_check(
    nu: WeightedSection,
    geometry: CurveGeometry | None = None,
    include_rhs2: bool = True,
) -> tuple[float, float, float | None]:
    """Three independent evaluations of the second-variation energy.

    lhs   -- 8*int |d1bar(d1bar nu)|^2 dA  (direct)
    rhs1  -- 8*int (|d1(d1bar nu)|^2 - |d1bar nu|^2 * ric_ee) dA
             (after integrating by parts twice and commuting derivatives)
    rhs2  -- (1/2)*int (|L nu|^2 - 2c*Re<L nu, nu>) dA on Einstein ambients,
             with L the Jacobi operator and c the Einstein constant; raises
             NotEinstein otherwise (unless include_rhs2=False).

    All returned values carry the fixed V-norm pairing constant.
    """
    _require_weight(nu, 0, 1, "wplus_identity_check")
    geo = nu.geometry
    if geometry is not None and geometry is not geo:
        raise UsageError("geometry argument does not match the section's geometry")

    lhs = second_variation_wplus(nu).value * VNORM_PAIRING

    g1 = d1bar(nu)
    g11 = d1(g1)
    rhs1_samples = 8.0 * (np.abs(g11.values) ** 2 - np.abs(g1.values) ** 2 * geo.ric_ee)
    rhs1 = float(geo.integrate(rhs1_samples)) * VNORM_PAIRING

    rhs2: float | None = None
    if include_rhs2:
        c = geo.ambient.einstein_constant
        if c is None:
            raise NotEinstein(
                f"ambient {geo.ambient.kind.value} with these parameters is not "
                "Einstein; the eigenvalue-form identity does not apply"
            )
        Lnu = jacobi_apply(nu)
        rhs2_samples = 0.5 * (
            np.abs(Lnu.values) ** 2
            - 2.0 * c * np.real(Lnu.values * np.conj(nu.values))
        )
        rhs2 = float(geo.integrate(rhs2_samples)) * VNORM_PAIRING
    return lhs, rhs1, rhs2
