"""Ritz bases, operator matrices, eigensolves, and convergence studies.

The basis on each backend consists of the reference modes (plane waves on
the torus, spin-weighted harmonics of the round reference on the sphere)
up to a level cutoff.  Operator matrices are quadrature pairings against
the curve's actual area form; on exactly-round catalog members every
entry is exact to rounding, on the perturbed member the spectral margin
of the engine keeps truncation below the reporting tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from .curves import Chart
from .errors import (
    CutoffTooSmall,
    GramIllConditioned,
    IncompatibleSpin,
    NonConvergence,
    UnstableKernel,
    UsageError,
    WeightMismatch,
)
from .geometry import CurveGeometry

#: default tolerances (see also the verification module)
CLUSTER_GAP = 1.0e-4
KERNEL_TOL = 1.0e-6
GRAM_COND_MAX = 1.0e12
ASSEMBLY_CHUNK = 128


class BasisBackend(str, Enum):
    TorusFourier = "TorusFourier"
    SphereHarmonicGalerkin = "SphereHarmonicGalerkin"


class OperatorKind(str, Enum):
    Jacobi = "Jacobi"
    AreaForm = "AreaForm"
    WplusForm = "WplusForm"
    Dbar = "Dbar"


@dataclass(frozen=True, eq=False)
class SectionBasis:
    """Ritz space of reference modes up to a level cutoff."""

    backend: BasisBackend
    size: int
    weights: tuple[int, int]
    gram: np.ndarray
    geometry: CurveGeometry
    cutoff: int
    mode_indices: np.ndarray
    scale: float  # basis element = scale * unit-reference-norm mode

    @property
    def gram_cond(self) -> float:
        w = np.linalg.eigvalsh(self.gram)
        if w[0] <= 0:
            return np.inf
        return float(w[-1] / w[0])

    def fields(self, positions: np.ndarray | None = None) -> np.ndarray:
        """Grid values of selected basis elements (all by default)."""
        idx = self.mode_indices if positions is None else self.mode_indices[positions]
        p, q = self.weights
        return self.scale * self.geometry.engine().mode_fields(p, q, idx)

    def synthesize(self, coeff: np.ndarray) -> np.ndarray:
        """Grid field of the element with the given coefficient vector."""
        p, q = self.weights
        eng = self.geometry.engine()
        full = np.zeros(coeff.shape[:-1] + (eng.num_modes(p, q),), dtype=complex)
        full[..., self.mode_indices] = np.asarray(coeff, dtype=complex) * self.scale
        return eng.synthesize(full, p, q)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Assembled operator in a Ritz basis (rows x columns pairing)."""

    matrix: np.ndarray
    basis: SectionBasis
    kind: OperatorKind
    hermiticity_residual: float
    target_basis: SectionBasis | None = None  # Dbar maps into a different class


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Clustered generalized eigenvalues of a quadratic operator."""

    eigenvalues: np.ndarray
    clusters: list[tuple[float, int]]
    kernel_dim: int
    lambda1: float | None
    resolution: int
    residual_estimates: list[float]
    curve: str = ""
    backend: str = ""
    kind: str = ""
    eigenvectors: np.ndarray | None = None

    def to_json_dict(self) -> dict:
        return {
            "curve": self.curve,
            "backend": self.backend,
            "cutoff": int(self.resolution),
            "kind": self.kind,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "clusters": [
                {"value": float(v), "multiplicity": int(m)} for v, m in self.clusters
            ],
            "kernel_dim": int(self.kernel_dim),
            "lambda1": None if self.lambda1 is None else float(self.lambda1),
            "residuals": [float(r) for r in self.residual_estimates],
        }


# ---------------------------------------------------------------------------
# basis construction
# ---------------------------------------------------------------------------

def build_basis(
    geometry: CurveGeometry, weights: tuple[int, int], cutoff: int
) -> SectionBasis:
    """Reference-mode Ritz basis for the given weight class up to 'cutoff'.

    Torus backend: plane waves with both frequencies bounded by the cutoff
    (gram = lattice area times the identity, exactly).  Sphere backend:
    spin-weighted reference harmonics of levels <= cutoff, paired against
    the curve's actual area form.
    """
    p, q = int(weights[0]), int(weights[1])
    cutoff = int(cutoff)
    if cutoff < 1:
        raise CutoffTooSmall(f"basis cutoff must be >= 1, got {cutoff}")
    eng = geometry.engine()
    if geometry.is_sphere and eng.spin(p, q) < 0:
        raise IncompatibleSpin(
            f"weight ({p},{q}) has spin {eng.spin(p, q)} < 0 on a degree-"
            f"{geometry.deg_normal} bundle"
        )
    if cutoff > geometry.max_cutoff():
        raise UsageError(
            f"cutoff {cutoff} exceeds this geometry's reliable range "
            f"{geometry.max_cutoff()} (max_level {geometry.max_level} minus "
            f"spectral margin {geometry.engine_margin}); rebuild the geometry "
            "with a larger max_level"
        )
    levels = eng.mode_levels(p, q)
    idx = np.where(levels <= cutoff)[0]
    expected_kernel = eng.spin(p, q) + 1 if geometry.is_sphere else 1
    if idx.size < max(expected_kernel, 1):
        raise CutoffTooSmall(
            f"basis of size {idx.size} cannot carry the expected kernel "
            f"dimension {expected_kernel}"
        )
    backend = (
        BasisBackend.SphereHarmonicGalerkin
        if geometry.is_sphere
        else BasisBackend.TorusFourier
    )
    scale = 1.0 if geometry.is_sphere else float(np.sqrt(geometry.area))

    gram = _pairing_matrix(geometry, (p, q), idx, (p, q), idx) * scale**2
    gram = 0.5 * (gram + gram.conj().T)
    return SectionBasis(
        backend=backend,
        size=int(idx.size),
        weights=(p, q),
        gram=gram,
        geometry=geometry,
        cutoff=cutoff,
        mode_indices=idx,
        scale=scale,
    )


def _pairing_matrix(geometry, src_w, src_idx, out_w, out_idx, op=None):
    """P[i, j] = <mode_i(out), Op mode_j(src)> against the curve's area form."""
    eng = geometry.engine()
    rows = np.zeros((src_idx.size, out_idx.size), dtype=complex)
    for lo in range(0, src_idx.size, ASSEMBLY_CHUNK):
        chunk = src_idx[lo : lo + ASSEMBLY_CHUNK]
        fields = eng.mode_fields(*src_w, chunk)
        if op is not None:
            fields = op(fields)
        rows[lo : lo + chunk.size] = eng.expand_dA(fields, *out_w)[..., out_idx]
    # rows[j, i] = <Op mode_j, mode_i>; the pairing matrix is its conj transpose
    return rows.conj().T


# ---------------------------------------------------------------------------
# operator assembly
# ---------------------------------------------------------------------------

def assemble(
    geometry: CurveGeometry, basis: SectionBasis, kind: OperatorKind | str
) -> OperatorMatrix:
    """Assemble the operator matrix of 'kind' in the given basis.

    Jacobi pairs basis elements against the second-order operator; the two
    quadratic forms pair first/second derivatives directly (an independent
    route, so AreaForm = Jacobi/4 is a genuine integration-by-parts test).
    Dbar is rectangular: it maps into the raised weight class with cutoff
    lowered by one, which matches the exact level bookkeeping of the
    reference ladder.
    """
    kind = OperatorKind(kind)
    if basis.geometry is not geometry:
        raise UsageError("basis was built for a different geometry")
    if basis.weights != (0, 1):
        raise WeightMismatch(
            f"{kind.value} acts on weight-(0,1) sections; basis carries "
            f"{basis.weights}"
        )
    eng = geometry.engine()
    idx = basis.mode_indices
    s2 = basis.scale**2

    if kind is OperatorKind.Jacobi:
        def op(F):
            return -4.0 * eng.apply_d1(eng.apply_d1bar(F, 0, 1), 1, 1)

        A = _pairing_matrix(geometry, (0, 1), idx, (0, 1), idx, op=op) * s2
        return _finish_square(A, basis, kind)

    if kind is OperatorKind.AreaForm:
        A = _derivative_form(geometry, idx, order=1) * s2
        return _finish_square(A, basis, kind)

    if kind is OperatorKind.WplusForm:
        A = _derivative_form(geometry, idx, order=2) * s2
        return _finish_square(A, basis, kind)

    # Dbar: rows are raised-class reference modes of cutoff-1
    tgt_levels = eng.mode_levels(1, 1)
    if geometry.is_sphere:
        tgt_idx = np.where(tgt_levels <= basis.cutoff - 1)[0]
    else:
        tgt_idx = np.where(tgt_levels <= basis.cutoff)[0]
    tgt_gram = _pairing_matrix(geometry, (1, 1), tgt_idx, (1, 1), tgt_idx) * s2
    target = SectionBasis(
        backend=basis.backend,
        size=int(tgt_idx.size),
        weights=(1, 1),
        gram=0.5 * (tgt_gram + tgt_gram.conj().T),
        geometry=geometry,
        cutoff=max(basis.cutoff - 1, 0) if geometry.is_sphere else basis.cutoff,
        mode_indices=tgt_idx,
        scale=basis.scale,
    )

    def op(F):
        return eng.apply_d1bar(F, 0, 1)

    K = _pairing_matrix(geometry, (0, 1), idx, (1, 1), tgt_idx, op=op) * s2
    return OperatorMatrix(
        matrix=K, basis=basis, kind=kind, hermiticity_residual=0.0, target_basis=target
    )


def _derivative_form(geometry, idx, order):
    """F[i,j] = <D^order b_i, D^order b_j> with D the raising derivative.

    The pairing goes through reference-mode coefficients (Parseval): the
    derivative images are band-limited in the raised class, so pairing
    their coefficient vectors reproduces the area-form quadrature exactly
    up to the engine's spectral margin.
    """
    eng = geometry.engine()
    C0 = np.zeros((idx.size, eng.num_modes(order, 1)), dtype=complex)
    CA = np.zeros_like(C0)
    for lo in range(0, idx.size, ASSEMBLY_CHUNK):
        chunk = idx[lo : lo + ASSEMBLY_CHUNK]
        fields = eng.mode_fields(0, 1, chunk)
        fields = eng.apply_d1bar(fields, 0, 1)
        if order == 2:
            fields = eng.apply_d1bar(fields, 1, 1)
        C0[lo : lo + chunk.size] = eng.expand(fields, order, 1)
        CA[lo : lo + chunk.size] = eng.expand_dA(fields, order, 1)
    # <S_i, S_j>_dA = sum_k <S_i e^{2 rho}, B_k> conj(<S_j, B_k>)
    return CA @ np.conj(C0).T


def _finish_square(A, basis, kind):
    scale = np.linalg.norm(A)
    herm = float(np.linalg.norm(A - A.conj().T) / scale) if scale > 0 else 0.0
    return OperatorMatrix(matrix=A, basis=basis, kind=kind, hermiticity_residual=herm)


# ---------------------------------------------------------------------------
# eigensolve
# ---------------------------------------------------------------------------

def eigensolve(
    A: OperatorMatrix,
    cluster_gap: float = CLUSTER_GAP,
    kernel_tol: float = KERNEL_TOL,
    gram_cond_max: float = GRAM_COND_MAX,
    method: str = "dense",
    n_pairs: int | None = None,
    keep_vectors: bool = False,
) -> SpectrumReport:
    """Solve A v = lambda G v and cluster the spectrum.

    The kernel threshold is kernel_tol times the largest eigenvalue
    magnitude; clusters above it merge eigenvalues separated by less than
    cluster_gap relative to their magnitude.  lambda1 is the value of the
    first cluster above the kernel (None if the spectrum is all kernel).
    """
    if A.kind is OperatorKind.Dbar:
        raise UsageError("eigensolve applies to the quadratic kinds, not Dbar")
    basis = A.basis
    G = basis.gram
    gw = np.linalg.eigvalsh(G)
    if gw[0] <= 0 or gw[-1] / gw[0] > gram_cond_max:
        cond = np.inf if gw[0] <= 0 else gw[-1] / gw[0]
        raise GramIllConditioned(
            f"gram condition number {cond:.3e} exceeds {gram_cond_max:.1e}; "
            "reduce the cutoff or refine the grid"
        )
    H = 0.5 * (A.matrix + A.matrix.conj().T)

    if method == "dense":
        w, v = scipy.linalg.eigh(H, G)
    elif method == "iterative":
        w, v = _iterative_pairs(H, G, n_pairs)
    else:
        raise UsageError(f"unknown eigensolve method {method!r}")

    order = np.argsort(w)
    w = w[order]
    v = v[:, order]

    lam_max = float(np.max(np.abs(w))) if w.size else 0.0
    kth = kernel_tol * lam_max
    kernel_dim = int(np.sum(w <= kth)) if lam_max > 0 else int(w.size)

    clusters: list[tuple[float, int]] = []
    residuals: list[float] = []
    members: list[list[int]] = []
    current: list[int] = []
    for i in range(kernel_dim, w.size):
        if current and (w[i] - w[current[-1]]) > cluster_gap * max(abs(w[i]), abs(w[current[-1]])):
            members.append(current)
            current = [i]
        else:
            current = current + [i] if current else [i]
    if current:
        members.append(current)
    for group in members:
        vals = w[group]
        lam = float(np.mean(vals))
        clusters.append((lam, len(group)))
        vg = v[:, group]
        num = np.linalg.norm(H @ vg - G @ vg * lam, axis=0)
        den = np.linalg.norm(G @ vg, axis=0) * max(lam_max, 1e-300)
        residuals.append(float(np.max(num / den)))

    lambda1 = clusters[0][0] if clusters else None
    geo = basis.geometry
    return SpectrumReport(
        eigenvalues=w,
        clusters=clusters,
        kernel_dim=kernel_dim,
        lambda1=lambda1,
        resolution=basis.cutoff,
        residual_estimates=residuals,
        curve=geo.name,
        backend=basis.backend.value,
        kind=A.kind.value,
        eigenvectors=v if keep_vectors else None,
    )


def _iterative_pairs(H, G, n_pairs):
    from scipy.sparse.linalg import ArpackNoConvergence, eigsh

    k = n_pairs if n_pairs is not None else min(6, H.shape[0] - 1)
    k = max(1, min(k, H.shape[0] - 1))
    try:
        w, v = eigsh(H, k=k, M=G, which="SA")
    except ArpackNoConvergence as exc:
        raise NonConvergence(
            f"iterative eigensolver failed to converge for {k} pairs"
        ) from exc
    return w, v


# ---------------------------------------------------------------------------
# convergence study
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConvergenceStudy:
    """Per-cutoff lambda1 with an extrapolated limit."""

    kind: str
    curve: str
    rows: list[dict]  # cutoff, lambda1, kernel_dim, observed_order
    lambda1_extrapolated: float

    def to_rows(self) -> list[dict]:
        return self.rows


def convergence_study(
    geometry: CurveGeometry, kind: OperatorKind | str, cutoffs: list[int]
) -> ConvergenceStudy:
    """Track lambda1 across increasing cutoffs and extrapolate the limit.

    Requires at least three increasing cutoffs.  The kernel dimension must
    agree at the two largest cutoffs (otherwise the reported spectrum is
    not trustworthy and UnstableKernel is raised).
    """
    kind = OperatorKind(kind)
    cutoffs = [int(c) for c in cutoffs]
    if len(cutoffs) < 3:
        raise UsageError(f"convergence study needs at least 3 cutoffs, got {len(cutoffs)}")
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise UsageError("cutoffs must be strictly increasing")

    lam: list[float] = []
    kdim: list[int] = []
    for c in cutoffs:
        basis = build_basis(geometry, (0, 1), c)
        rep = eigensolve(assemble(geometry, basis, kind))
        if rep.lambda1 is None:
            raise UnstableKernel(
                f"cutoff {c}: spectrum is entirely kernel; no lambda1 to track"
            )
        lam.append(rep.lambda1)
        kdim.append(rep.kernel_dim)

    if kdim[-1] != kdim[-2]:
        raise UnstableKernel(
            f"kernel dimension changed between the two largest cutoffs: "
            f"{kdim[-2]} (cutoff {cutoffs[-2]}) vs {kdim[-1]} (cutoff {cutoffs[-1]})"
        )

    rows = []
    for i, c in enumerate(cutoffs):
        order = None
        if i >= 2:
            d1_ = lam[i - 1] - lam[i - 2]
            d2_ = lam[i] - lam[i - 1]
            if abs(d2_) > 1e-300 and abs(d1_) > abs(d2_):
                ratio = np.log(abs(d1_) / abs(d2_))
                step = np.log(cutoffs[i] / cutoffs[i - 2]) / 2.0
                order = float(ratio / step) if step > 0 else None
        rows.append(
            {
                "cutoff": c,
                "lambda1": float(lam[i]),
                "kernel_dim": int(kdim[i]),
                "observed_order": order,
            }
        )

    # Aitken extrapolation on the last three values, guarded against the
    # already-converged (exact) case where the differences vanish
    l1, l2, l3 = lam[-3], lam[-2], lam[-1]
    denom = (l3 - l2) - (l2 - l1)
    scale = max(abs(l3), 1.0)
    if abs(denom) < 1e-13 * scale or abs(l3 - l2) < 1e-13 * scale:
        extrap = l3
    else:
        extrap = l3 - (l3 - l2) ** 2 / denom

    return ConvergenceStudy(
        kind=kind.value, curve=geometry.name, rows=rows, lambda1_extrapolated=float(extrap)
    )
