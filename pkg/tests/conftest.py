"""Shared fixtures: session-cached geometries, bases, and spectra.

Geometry construction and operator assembly dominate test runtime, and the
objects are immutable, so one cache serves the whole session.  Tests that
need modified copies (regauge, custom resolution) build their own.
"""

from __future__ import annotations

import pytest

from jacobi_spectra.geometry import build_geometry
from jacobi_spectra.spectral import OperatorKind, assemble, build_basis, eigensolve

_GEOMETRY_CACHE = {}
_BASIS_CACHE = {}
_REPORT_CACHE = {}


def get_geometry(name, **params):
    key = (name, tuple(sorted(params.items())))
    if key not in _GEOMETRY_CACHE:
        _GEOMETRY_CACHE[key] = build_geometry(name, **params)
    return _GEOMETRY_CACHE[key]


def get_basis(name, cutoff, **params):
    key = (name, cutoff, tuple(sorted(params.items())))
    if key not in _BASIS_CACHE:
        _BASIS_CACHE[key] = build_basis(get_geometry(name, **params), (0, 1), cutoff)
    return _BASIS_CACHE[key]


def get_jacobi_report(name, cutoff, keep_vectors=False, **params):
    key = (name, cutoff, keep_vectors, tuple(sorted(params.items())))
    if key not in _REPORT_CACHE:
        geometry = get_geometry(name, **params)
        basis = get_basis(name, cutoff, **params)
        A = assemble(geometry, basis, OperatorKind.Jacobi)
        _REPORT_CACHE[key] = eigensolve(A, keep_vectors=keep_vectors)
    return _REPORT_CACHE[key]


@pytest.fixture(scope="session")
def geometry_factory():
    return get_geometry


@pytest.fixture(scope="session")
def basis_factory():
    return get_basis


@pytest.fixture(scope="session")
def report_factory():
    return get_jacobi_report
