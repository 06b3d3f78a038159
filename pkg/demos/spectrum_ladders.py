"""Walk the catalog and compare each measured ladder with its closed form.

Run from anywhere:  python3 demos/spectrum_ladders.py
Artifacts (SVG stem plots) land in demos/out/.
"""

from pathlib import Path

import numpy as np

from jacobi_spectra import (
    OperatorKind,
    assemble,
    build_basis,
    build_geometry,
    eigensolve,
)
from jacobi_spectra.svg import render_spectrum_svg

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

# closed-form first eigenvalue ladders (value, multiplicity) for the members
# that are exactly diagonalized by the reference modes
LADDERS = {
    "Line_CP2": lambda n: (4.0 * n * (n + 2), 2 * n + 2),
    "FactorSphere": lambda n: (float(n * (n + 1)), 2 * n + 1),
    "Diagonal_Product": lambda n: (0.5 * n * (n + 3), 2 * n + 3),
}

print("=" * 72)
print("stability ladders of the catalog curves")
print("=" * 72)

for name in ("Line_CP2", "Conic_CP2", "FactorSphere", "Diagonal_Product", "FlatSubtorus"):
    geo = build_geometry(name)
    cutoff = 6 if geo.is_sphere else 4
    basis = build_basis(geo, (0, 1), cutoff)
    rep = eigensolve(assemble(geo, basis, OperatorKind.Jacobi))

    c = geo.ambient.einstein_constant
    print(f"\n{name}  (area {geo.area:.6f}, deg N {geo.deg_normal}, "
          f"c {'-' if c is None else c:g})")
    print(f"  kernel dim {rep.kernel_dim}, basis {basis.size}, cutoff {cutoff}")
    shown = ", ".join(f"{v:.6g} (x{m})" for v, m in rep.clusters[:4])
    print(f"  clusters: {shown}")

    if name in LADDERS:
        worst = 0.0
        for k, (v, m) in enumerate(rep.clusters[:4], start=1):
            pv, pm = LADDERS[name](k)
            worst = max(worst, abs(v - pv))
            assert m == pm, (name, k, m, pm)
        print(f"  closed-form ladder reproduced, worst |dev| = {worst:.2e}")
    elif name == "FlatSubtorus":
        lam = rep.eigenvalues[rep.kernel_dim] / (4.0 * np.pi**2)
        print(f"  lambda1 / (4 pi^2) = {lam:.12f}  (frequency (1,0) wave)")
    else:
        print(f"  lambda1 = {rep.lambda1:.9f}  "
              f"(equality case: 2c = {2 * c:g}; the curve is not round,")
        print("   so the higher clusters have no elementary closed form)")

    marker = 2.0 * c if c else None
    svg = render_spectrum_svg(
        rep.eigenvalues, rep.kernel_dim, marker_value=marker,
        title=f"{name}: normal-spectrum ladder (cutoff {cutoff})",
    )
    path = OUT / f"ladder_{name}.svg"
    path.write_text(svg)
    print(f"  wrote {path.relative_to(OUT.parent.parent)}")

print("\ndone.")
