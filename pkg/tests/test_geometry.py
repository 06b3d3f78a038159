"""Geometry layer: grids, fields, curvature oracles, topology."""

import json
from pathlib import Path

import numpy as np
import pytest

import oracles
from jacobi_spectra.curves import fields_for
from jacobi_spectra.errors import (
    ChartOverflow,
    DegenerateLattice,
    FrameDiscontinuity,
    NonIntegralChernNumber,
    UsageError,
)
from jacobi_spectra.geometry import (
    build_geometry,
    curvatures,
    latitude_holonomies,
    normal_connection,
    normal_winding_number,
    topological_invariants,
)

CLOSED_FORM_AREAS = {
    "Line_CP2": np.pi,
    "Conic_CP2": 2.0 * np.pi,
    "FactorSphere": 4.0 * np.pi,
    "Diagonal_Product": 8.0 * np.pi,
    "FlatSubtorus": 1.0,
}
EXPECTED_DEG = {
    "Line_CP2": 1,
    "Conic_CP2": 4,
    "FactorSphere": 0,
    "Diagonal_Product": 2,
    "FlatSubtorus": 0,
}
ALL_CURVES = list(CLOSED_FORM_AREAS)


@pytest.mark.parametrize("name", ALL_CURVES)
def test_area_degree_euler(name, geometry_factory):
    g = geometry_factory(name)
    assert g.area == pytest.approx(CLOSED_FORM_AREAS[name], rel=1e-12)
    assert g.deg_normal == EXPECTED_DEG[name]
    assert g.euler_char == 2 - 2 * g.genus
    euler, deg, area = topological_invariants(g)
    assert (euler, deg) == (g.euler_char, g.deg_normal)
    assert area == pytest.approx(g.area, rel=1e-14)
    assert max(g.chern_residuals) <= 1e-9


@pytest.mark.parametrize("name", ALL_CURVES)
def test_grid_weights(name, geometry_factory):
    g = geometry_factory(name)
    assert np.all(g.grid.weights > 0)
    assert np.sum(g.area_weights) == pytest.approx(g.area, rel=1e-14)
    assert np.allclose(g.area_weights, g.grid.weights * g.e2u)


@pytest.mark.parametrize(
    "name,params",
    [
        ("Line_CP2", {}),
        ("Conic_CP2", {}),
        ("FactorSphere", {}),
        ("Diagonal_Product", {}),
        ("Diagonal_Product", {"K1": 2.0, "K2": 1.0}),
        ("FlatSubtorus", {}),
    ],
)
def test_curvature_balance_pointwise(name, params, geometry_factory):
    # intrinsic + normal curvature = twice the ambient Ricci on the frame
    g = geometry_factory(name, **params)
    assert g.balance_residual() <= 1e-10
    r1212, r1234, ric = curvatures(g)
    assert np.max(np.abs(r1212 - g.R1212)) <= 1e-10
    assert np.max(np.abs(r1234 - g.R1234)) <= 1e-10
    assert np.max(np.abs(ric - g.ric_ee)) <= 1e-10


@pytest.mark.parametrize(
    "name,params,totally_geodesic",
    [
        ("Line_CP2", {}, True),
        ("FactorSphere", {}, True),
        ("Diagonal_Product", {}, True),
        ("Diagonal_Product", {"K1": 2.0, "K2": 1.0}, True),
        ("Conic_CP2", {}, False),
    ],
)
def test_fd_riemann_oracle(name, params, totally_geodesic, geometry_factory):
    """Ambient curvature by nested finite differences of the metric alone.

    Where the embedding is totally geodesic the tangential/normal-plane
    values must equal the stored intrinsic/normal curvature fields; the
    Ricci contraction must match everywhere.
    """
    g = geometry_factory(name, **params)
    flds = fields_for(g.spec)
    i = g.grid.resolution[0] // 2  # moderate radius: well-conditioned FD
    for j in (0, 5, 11):
        z0 = g.grid.nodes[i, j]
        e1, e0 = flds.frames(np.array([z0]))
        zeta = flds.embed(np.array([z0]))[0]
        sec, mixed, ric = oracles.curvature_on_frames(g.ambient, zeta, e1[0], e0[0])
        assert ric == pytest.approx(g.ric_ee[i, j], abs=1e-4)
        if totally_geodesic:
            assert sec == pytest.approx(g.R1212[i, j], abs=1e-4)
            assert mixed == pytest.approx(g.R1234[i, j], abs=1e-4)


@pytest.mark.parametrize("name", ["Line_CP2", "Conic_CP2", "Diagonal_Product"])
def test_fd_conformal_gauss_oracle(name, geometry_factory):
    """Intrinsic curvature field vs a 5-point Laplacian of the closed-form u."""
    g = geometry_factory(name)
    flds = fields_for(g.spec)

    def ufun(z):
        return 0.5 * np.log(flds.e2u(np.asarray(z, dtype=complex)))

    nth = g.grid.resolution[0]
    for (i, j) in [(nth // 2, 0), (nth // 3, 11), (2 * nth // 3, 4)]:
        z0 = g.grid.nodes[i, j]
        assert oracles.fd_conformal_gauss(ufun, z0) == pytest.approx(
            g.R1212[i, j], abs=1e-5
        )


@pytest.mark.parametrize("name", ["Line_CP2", "Conic_CP2", "FactorSphere", "Diagonal_Product"])
def test_winding_and_holonomy(name, geometry_factory):
    g = geometry_factory(name)
    assert normal_winding_number(g) == g.deg_normal
    flds = fields_for(g.spec)

    def afun(z):
        return flds.alpha(np.asarray(z, dtype=complex))

    drop = oracles.holonomy_trapezoid(afun, 1e-4) - oracles.holonomy_trapezoid(afun, 1e4)
    assert drop / (2.0 * np.pi) == pytest.approx(g.deg_normal, abs=1e-4)
    hol = latitude_holonomies(g)
    assert hol.shape == (g.grid.resolution[0],)


@pytest.mark.parametrize("name", ["Line_CP2", "Conic_CP2", "Diagonal_Product"])
def test_normal_connection_fd_route(name, geometry_factory):
    g = geometry_factory(name)
    a_analytic = normal_connection(g.spec, g.grid, method="analytic")
    a_fd = normal_connection(g.spec, g.grid, method="fd")
    scale = 1.0 + np.max(np.abs(a_analytic))
    assert np.max(np.abs(a_fd - a_analytic)) / scale <= 1e-5


def test_normal_connection_rejects_wild_gauge(geometry_factory):
    g = geometry_factory("Line_CP2")
    gauge = lambda z: np.exp(1j * 2.0e4 * np.real(z))  # noqa: E731
    with pytest.raises(FrameDiscontinuity):
        normal_connection(g.spec, g.grid, method="fd", gauge=gauge)


def test_regauge_preserves_curvature(geometry_factory):
    g = geometry_factory("Line_CP2")

    def chi(z):
        return (z + np.conj(z)) / (1.0 + np.abs(z) ** 2)

    def chi_z(z):
        return (1.0 - np.conj(z) ** 2) / (1.0 + np.abs(z) ** 2) ** 2

    g2 = g.with_regauge(chi(g.grid.nodes), chi_z(g.grid.nodes))
    assert g2.regauged
    assert g2.engine_margin >= 8
    assert np.max(np.abs(g2.alpha - (g.alpha + chi_z(g.grid.nodes)))) <= 1e-14
    # the shift is exact, so all curvature data is untouched
    assert g2.balance_residual() <= 1e-10
    assert np.array_equal(g2.R1234, g.R1234)


def test_chart_overflow_guard():
    flds = fields_for(build_geometry("Line_CP2", max_level=4).spec)
    with pytest.raises(ChartOverflow):
        flds.e2u(np.array([2.0e8 + 0j]))


def test_nonintegral_chern_on_garbage_grid():
    with pytest.raises(NonIntegralChernNumber):
        build_geometry("Conic_CP2", max_level=40, resolution=(4, 5))


def test_degenerate_lattice_rejected():
    with pytest.raises(DegenerateLattice):
        build_geometry("FlatSubtorus", lattice1=(1.0 + 0j, 2.0 + 0j))


def test_build_geometry_usage_errors():
    with pytest.raises(UsageError):
        build_geometry("Line_CP2", max_level=1)
    with pytest.raises(UsageError):
        build_geometry("NoSuchCurve")


def test_geometry_json_dump_validates(geometry_factory, tmp_path):
    import jsonschema

    g = geometry_factory("FactorSphere")
    doc = g.to_json_dict()
    schema = json.loads(
        (
            Path(__file__).resolve().parents[1]
            / "src/jacobi_spectra/schemas/geometry.schema.json"
        ).read_text()
    )
    jsonschema.validate(doc, schema)
    n = np.prod(g.grid.resolution)
    assert len(doc["u"]) == n
    assert len(doc["nodes"]["re"]) == n


def test_einstein_flags():
    g_mixed = build_geometry("FactorSphere", K1=2.0, K2=1.0, max_level=6)
    assert g_mixed.ambient.einstein_constant is None
    assert g_mixed.ambient.ricci_infimum == pytest.approx(1.0)
    assert g_mixed.einstein_deviation() is None
    g = build_geometry("Line_CP2", max_level=6)
    assert g.ambient.einstein_constant == pytest.approx(6.0)
    assert g.einstein_deviation() <= 1e-12
