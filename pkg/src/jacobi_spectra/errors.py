"""Exception taxonomy for the jacobi_spectra package.

Every exception carries a ``category`` used by the CLI to map failures to
exit codes: ``usage`` and ``geometry`` problems exit 2, ``solver`` problems
exit 3, and ``check`` outcomes (a verification that ran and failed) exit 1.
"""

from __future__ import annotations


class JacobiSpectraError(Exception):
    """Base class for all package errors."""

    category = "usage"


class UsageError(JacobiSpectraError):
    """Malformed request: bad names, bad flags, bad configuration."""

    category = "usage"


class NonPositiveCurvature(JacobiSpectraError):
    """A sphere factor was requested with Gauss curvature <= 0."""

    category = "geometry"


class DegenerateLattice(JacobiSpectraError):
    """A torus lattice basis is rank deficient (or negatively oriented)."""

    category = "geometry"


class UnsupportedGenus(JacobiSpectraError):
    """Genus >= 2 was requested; the catalog and the h0 bookkeeping stop at 1."""

    category = "geometry"


class ChartOverflow(JacobiSpectraError):
    """A chart coordinate left the numerically safe radius of the chart."""

    category = "geometry"


class NonIntegralChernNumber(JacobiSpectraError):
    """A curvature integral failed to land near an integer multiple of 2*pi."""

    category = "geometry"


class IncompatibleSpin(JacobiSpectraError):
    """The requested weights give a negative total bundle degree on the sphere."""

    category = "geometry"


class WeightOverflow(JacobiSpectraError):
    """A derivative left the range of weight classes the backend carries."""

    category = "usage"


class CutoffTooSmall(JacobiSpectraError):
    """The requested basis cannot even contain the predicted kernel."""

    category = "usage"


class GramIllConditioned(JacobiSpectraError):
    """The basis Gram matrix condition number exceeds the safe limit."""

    category = "solver"


class NonConvergence(JacobiSpectraError):
    """An iterative eigensolver failed to converge."""

    category = "solver"


class UnstableKernel(JacobiSpectraError):
    """The numerical kernel dimension changed between the two largest cutoffs."""

    category = "check"


class NotEinstein(JacobiSpectraError):
    """An Einstein-only quantity was requested on a non-Einstein ambient."""

    category = "usage"


class HypothesisViolation(JacobiSpectraError):
    """A theorem check was requested outside the hypotheses it needs."""

    category = "usage"


class WeightMismatch(JacobiSpectraError):
    """Sections of different weights (or the wrong weight) were combined."""

    category = "usage"


class FrameDiscontinuity(JacobiSpectraError):
    """Adjacent frame gauges differ too much to difference safely."""

    category = "geometry"


class InapplicableCheck(JacobiSpectraError):
    """A check does not apply to this geometry; reported as skipped, not failed."""

    category = "check"
