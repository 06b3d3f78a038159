"""Spectral engines built on the round/flat reference geometry.

Genus 0
-------
A weight-(p, q) quantity on a degree-d curve carries the integer spin
parameter D = 2p + q*d.  On the constant-curvature reference metric the
functions

    B_{n,mu} = N * s^|mu| * c^|D-mu| * P_k^(|mu|, |D-mu|)(cos theta) * e^(i mu phi),

with s = sin(theta/2), c = cos(theta/2) and P a Jacobi polynomial, form an
orthonormal basis (levels n = 0..L, chart frequencies mu = -n..D+n).  The
reference raising/lowering operators act as exact ladders between adjacent
levels; their coefficients are computed here by quadrature-exact projection
and checked at build time against sqrt(K n (D+n+1))/2.

The curve's actual operators differ from the reference ones by
multiplication with the closed-form deviation fields stored on the
geometry (conformal ratio rho, connection differences), so every operator
application is "exact ladder + pointwise multiplication".

Genus 1
-------
Plane waves exp(2*pi*i(m s + n t)) on the fundamental domain diagonalize
everything; derivatives act by exact complex scalars.
"""

from __future__ import annotations

import numpy as np
from scipy.special import eval_jacobi, gammaln

from .errors import UsageError, WeightOverflow

#: weight classes carried by the engines (q is the normal-frame weight)
CARRIED_P = (0, 1, 2, 3)
Q_CARRIED = 1


def _check_class(p: int, q: int) -> None:
    if q != Q_CARRIED or p not in CARRIED_P:
        raise WeightOverflow(
            f"weight class ({p},{q}) is not carried; available classes are "
            f"(p,{Q_CARRIED}) for p in {CARRIED_P}"
        )


class SphereModeClass:
    """Orthonormal spin-D mode set on the round reference sphere."""

    def __init__(self, D: int, levels: int, K: float, x: np.ndarray, wx: np.ndarray, phi: np.ndarray):
        if D < 0:
            raise UsageError(f"spin parameter D={D} < 0 is not representable")
        self.D = int(D)
        self.levels = int(levels)
        self.K = float(K)
        self.x = x
        self.wx = wx
        self.phi = phi

        ns, mus = [], []
        for n in range(self.levels + 1):
            mu = np.arange(-n, D + n + 1)
            ns.append(np.full(mu.size, n))
            mus.append(mu)
        self.n_ = np.concatenate(ns)
        self.mu_ = np.concatenate(mus)
        self.size = self.n_.size
        self.a_ = np.abs(self.mu_)
        self.b_ = np.abs(D - self.mu_)
        self.npol_ = self.n_ - (self.a_ + self.b_ - D) // 2

        # unit L2(dA0) normalization (dA0 = round area form, total 4*pi/K)
        k, a, b = self.npol_, self.a_, self.b_
        logh = (
            np.log(2.0)
            - np.log(2 * k + a + b + 1.0)
            + gammaln(k + a + 1.0)
            + gammaln(k + b + 1.0)
            - gammaln(k + a + b + 1.0)
            - gammaln(k + 1.0)
        )
        self.norm_ = np.exp(-0.5 * (np.log(2.0 * np.pi / K) + logh))

        s = np.sqrt((1.0 - x) / 2.0)[None, :]
        c = np.sqrt((1.0 + x) / 2.0)[None, :]
        self._s, self._c = s, c
        kc, ac, bc = k[:, None], a[:, None].astype(float), b[:, None].astype(float)
        self.rawP = eval_jacobi(kc, ac, bc, x[None, :])
        dP = 0.5 * (kc + ac + bc + 1.0) * eval_jacobi(np.maximum(kc - 1, 0), ac + 1, bc + 1, x[None, :])
        self.rawdP = np.where(kc > 0, dP, 0.0)
        self.prof = self.norm_[:, None] * s**ac * c**bc * self.rawP

        # azimuthal bookkeeping
        self.mus_all = np.arange(-self.levels, D + self.levels + 1)
        self.n_cols = self.mus_all.size
        self.col_ = self.mu_ + self.levels
        self._members = [np.where(self.col_ == ci)[0] for ci in range(self.n_cols)]
        n_phi = phi.size
        if self.n_cols > n_phi:
            raise UsageError(
                f"azimuthal grid ({n_phi}) cannot separate {self.n_cols} chart frequencies"
            )
        self._E_syn = np.exp(1j * np.outer(self.mus_all, phi))
        self._E_exp = np.conj(self._E_syn).T * (2.0 * np.pi / n_phi)
        self._w_theta = wx / K  # theta weights of dA0 (phi weight folded into _E_exp)

    def index_of(self, n: np.ndarray, mu: np.ndarray) -> np.ndarray:
        """Flat index of mode (n, mu); valid for -n <= mu <= D+n, n <= levels."""
        return n * (self.D + n) + (mu + n)

    def expand(self, F: np.ndarray) -> np.ndarray:
        """Coefficients <F, B_k> in the round reference inner product."""
        F = np.asarray(F, dtype=complex)
        Fh = (F @ self._E_exp) * self._w_theta[:, None]
        out = np.zeros(F.shape[:-2] + (self.size,), dtype=complex)
        for ci, idx in enumerate(self._members):
            if idx.size:
                out[..., idx] = Fh[..., :, ci] @ self.prof[idx].T
        return out

    def synthesize(self, coeff: np.ndarray) -> np.ndarray:
        """Grid field sum_k coeff_k * B_k."""
        coeff = np.asarray(coeff, dtype=complex)
        n_theta = self.x.size
        PM = np.zeros(coeff.shape[:-1] + (n_theta, self.n_cols), dtype=complex)
        for ci, idx in enumerate(self._members):
            if idx.size:
                PM[..., :, ci] = coeff[..., idx] @ self.prof[idx]
        return PM @ self._E_syn

    def mode_fields(self, idx: np.ndarray) -> np.ndarray:
        """Grid values of selected basis modes, stacked along the first axis."""
        idx = np.asarray(idx)
        return self.prof[idx][:, :, None] * self._E_syn[self.col_[idx]][:, None, :]


class _Ladder:
    """Exact level-shift action of a reference operator between two classes."""

    __slots__ = ("valid", "tgt_idx", "coeff", "tgt_size")

    def __init__(self, valid, tgt_idx, coeff, tgt_size):
        self.valid = valid
        self.tgt_idx = tgt_idx
        self.coeff = coeff
        self.tgt_size = tgt_size

    def apply(self, coeff_src: np.ndarray) -> np.ndarray:
        out = np.zeros(coeff_src.shape[:-1] + (self.tgt_size,), dtype=complex)
        out[..., self.tgt_idx] = coeff_src[..., self.valid] * self.coeff
        return out


class SphereEngine:
    """Operator engine for genus-0 catalog curves."""

    def __init__(self, geometry):
        grid = geometry.grid
        self.geometry = geometry
        self.K = float(geometry.ref_curvature)
        self.d = int(geometry.deg_normal)
        self.x = grid.x
        self.wx = grid.x_weights
        self.phi = grid.phi
        self.levels = int(geometry.max_level) + 2  # headroom for raised levels
        r2 = (grid.nodes * np.conj(grid.nodes)).real
        self._em_u0 = 0.5 * np.sqrt(self.K) * (1.0 + r2)
        self.em_rho = np.exp(-geometry.rho)
        self.e2rho = np.exp(2.0 * geometry.rho)
        self._classes: dict[tuple[int, int], SphereModeClass] = {}
        self._ladders: dict[tuple[str, int, int], _Ladder] = {}
        self._mults: dict[tuple[str, int, int], np.ndarray] = {}
        self._resolution_ok()

    def _resolution_ok(self):
        d_max = 2 * max(CARRIED_P) + self.d
        n_theta, n_phi = self.x.size, self.phi.size
        if 2 * n_theta - 1 < 2 * self.levels + d_max or n_phi <= 2 * self.levels + d_max:
            raise UsageError(
                f"grid resolution ({n_theta},{n_phi}) cannot carry spectral level "
                f"{self.levels} with spin up to {d_max}"
            )

    # -- classes ---------------------------------------------------------------
    def spin(self, p: int, q: int) -> int:
        return 2 * p + q * self.d

    def mode_class(self, p: int, q: int) -> SphereModeClass:
        _check_class(p, q)
        key = (p, q)
        if key not in self._classes:
            self._classes[key] = SphereModeClass(
                self.spin(p, q), self.levels, self.K, self.x, self.wx, self.phi
            )
        return self._classes[key]

    def num_modes(self, p: int, q: int) -> int:
        return self.mode_class(p, q).size

    def mode_levels(self, p: int, q: int) -> np.ndarray:
        return self.mode_class(p, q).n_

    def mode_freqs(self, p: int, q: int) -> np.ndarray:
        return self.mode_class(p, q).mu_

    def mode_fields(self, p: int, q: int, idx: np.ndarray) -> np.ndarray:
        return self.mode_class(p, q).mode_fields(idx)

    def expand(self, F: np.ndarray, p: int, q: int) -> np.ndarray:
        return self.mode_class(p, q).expand(F)

    def expand_dA(self, F: np.ndarray, p: int, q: int) -> np.ndarray:
        """Coefficients <F, B_k> in the *curve's* area inner product."""
        return self.mode_class(p, q).expand(F * self.e2rho)

    def synthesize(self, coeff: np.ndarray, p: int, q: int) -> np.ndarray:
        return self.mode_class(p, q).synthesize(coeff)

    # -- reference ladders -------------------------------------------------------
    def _ladder(self, kind: str, p: int, q: int) -> _Ladder:
        key = (kind, p, q)
        if key not in self._ladders:
            src = self.mode_class(p, q)
            tgt = self.mode_class(p + 1, q) if kind == "dbar" else self.mode_class(p - 1, q)
            self._ladders[key] = self._build_ladder(kind, src, tgt)
        return self._ladders[key]

    def _build_ladder(self, kind: str, src: SphereModeClass, tgt: SphereModeClass) -> _Ladder:
        D, K = src.D, self.K
        s, c = src._s, src._c
        a = src.a_[:, None].astype(float)
        b = src.b_[:, None].astype(float)
        mu = src.mu_[:, None].astype(float)
        n = src.n_.astype(float)
        if kind == "dbar":
            c1 = 0.5 * (a - mu)
            c2 = 0.5 * (D - mu - b)
            tgt_n, tgt_mu = src.n_ - 1, src.mu_ + 1
            valid = src.n_ >= 1
            expected = 0.5 * np.sqrt(K * n * (D + n + 1.0))
        else:
            c1 = 0.5 * (a + mu)
            c2 = 0.5 * (mu - D - b)
            tgt_n, tgt_mu = src.n_ + 1, src.mu_ - 1
            valid = src.n_ + 1 <= tgt.levels
            expected = 0.5 * np.sqrt(K * (n + 1.0) * (D + n))
        image = (0.5 * np.sqrt(K)) * src.norm_[:, None] * (
            c1 * s ** (a - 1) * c ** (b + 1) * src.rawP
            + c2 * s ** (a + 1) * c ** (b - 1) * src.rawP
            - 2.0 * s ** (a + 1) * c ** (b + 1) * src.rawdP
        )
        w = 2.0 * np.pi * (self.wx / K)
        tgt_idx = tgt.index_of(tgt_n[valid], tgt_mu[valid])
        pj = tgt.prof[tgt_idx]
        coeff = np.sum(image[valid] * pj * w, axis=1)
        resid = np.sqrt(np.sum((image[valid] - coeff[:, None] * pj) ** 2 * w, axis=1))
        lost = np.sqrt(np.abs(np.sum(image[~valid] ** 2 * w, axis=1)))
        scale = 1.0 + np.abs(coeff)
        if np.any(resid > 1e-8 * scale):
            raise AssertionError(
                f"reference {kind} ladder image is not a pure mode "
                f"(max residual {np.max(resid / scale):.3e})"
            )
        bad = np.abs(np.abs(coeff) - expected[valid]) > 1e-8 * (1.0 + expected[valid])
        if np.any(bad):
            raise AssertionError(f"reference {kind} ladder coefficient mismatch")
        if kind == "dbar" and np.any(lost > 1e-10):
            raise AssertionError("level-0 modes are not annihilated by the raising operator")
        return _Ladder(valid, tgt_idx, coeff, tgt.size)

    # -- deviation multipliers -----------------------------------------------------
    def _mult(self, kind: str, p: int, q: int) -> np.ndarray:
        key = (kind, p, q)
        if key not in self._mults:
            g = self.geometry
            if kind == "dbar":
                field = 1j * self._em_u0 * (p * np.conj(g.delta_tau) + q * np.conj(g.delta_alpha))
            else:
                field = 1j * self._em_u0 * (p * g.delta_tau + q * g.delta_alpha)
            self._mults[key] = field
        return self._mults[key]

    # -- first-order operators -----------------------------------------------------
    def apply_d1bar(self, F: np.ndarray, p: int, q: int) -> np.ndarray:
        """Raising derivative: weight (p,q) -> (p+1,q)."""
        _check_class(p, q)
        _check_class(p + 1, q)
        coeff = self.expand(F, p, q)
        ref = self.synthesize(self._ladder("dbar", p, q).apply(coeff), p + 1, q)
        return self.em_rho * (ref + self._mult("dbar", p, q) * F)

    def apply_d1(self, F: np.ndarray, p: int, q: int) -> np.ndarray:
        """Lowering derivative: weight (p,q) -> (p-1,q)."""
        _check_class(p, q)
        _check_class(p - 1, q)
        coeff = self.expand(F, p, q)
        ref = self.synthesize(self._ladder("d1", p, q).apply(coeff), p - 1, q)
        return self.em_rho * (ref + self._mult("d1", p, q) * F)

    def random_section(self, p: int, q: int, level: int, rng: np.random.Generator) -> np.ndarray:
        """Band-limited random section: unit-variance coefficients up to 'level'."""
        cls = self.mode_class(p, q)
        mask = cls.n_ <= level
        coeff = np.zeros(cls.size, dtype=complex)
        m = int(np.sum(mask))
        coeff[mask] = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / np.sqrt(2.0 * m)
        return cls.synthesize(coeff)


class TorusModeClass:
    """Plane-wave modes exp(2*pi*i(m s + n t)) on the fundamental domain."""

    def __init__(self, n_modes: int, grid_n: int, lattice: tuple[complex, complex]):
        self.N = int(n_modes)
        side = np.arange(-self.N, self.N + 1)
        self.side = side
        self.m_, self.n_mode_ = [v.ravel() for v in np.meshgrid(side, side, indexing="ij")]
        self.size = self.m_.size
        self.level_ = np.maximum(np.abs(self.m_), np.abs(self.n_mode_))
        w1, w2 = lattice
        self.area = float(np.imag(np.conj(w1) * w2))
        s = np.arange(grid_n) / grid_n
        self._Es = np.exp(2j * np.pi * np.outer(side, s))
        self._Et = np.exp(2j * np.pi * np.outer(side, s))
        self._grid_n = grid_n
        # s(z) = Im(conj(w2) z)/Im(conj(w2) w1), t(z) = Im(conj(w1) z)/Im(conj(w1) w2),
        # and Im(c z) has d/dz = c/(2i), d/dzbar = -conj(c)/(2i)
        denom_s = np.imag(np.conj(w2) * w1)
        denom_t = np.imag(np.conj(w1) * w2)
        s_z = np.conj(w2) / (2j * denom_s)
        s_zb = -w2 / (2j * denom_s)
        t_z = np.conj(w1) / (2j * denom_t)
        t_zb = -w1 / (2j * denom_t)
        self.kappa_ = 2j * np.pi * (self.m_ * s_zb + self.n_mode_ * t_zb)
        self.kappa_prime_ = 2j * np.pi * (self.m_ * s_z + self.n_mode_ * t_z)

    def expand(self, F: np.ndarray) -> np.ndarray:
        F = np.asarray(F, dtype=complex)
        tmp = np.matmul(np.conj(self._Es), F)
        C = np.matmul(tmp, np.conj(self._Et).T)
        C *= np.sqrt(self.area) / self._grid_n**2
        return C.reshape(F.shape[:-2] + (self.size,))

    def synthesize(self, coeff: np.ndarray) -> np.ndarray:
        coeff = np.asarray(coeff, dtype=complex)
        side = self.side.size
        C = coeff.reshape(coeff.shape[:-1] + (side, side))
        F = np.matmul(self._Es.T, np.matmul(C, self._Et))
        return F / np.sqrt(self.area)

    def mode_fields(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx)
        return (
            self._Es[self.m_[idx] + self.N][:, :, None]
            * self._Et[self.n_mode_[idx] + self.N][:, None, :]
            / np.sqrt(self.area)
        )


class TorusEngine:
    """Operator engine for the flat genus-1 curve (everything is diagonal)."""

    def __init__(self, geometry):
        self.geometry = geometry
        self.N = int(geometry.max_level)
        grid_n = geometry.grid.resolution[0]
        if grid_n < 2 * self.N + 2:
            raise UsageError(
                f"torus grid {grid_n} too small for mode range +-{self.N} "
                f"(needs at least {2 * self.N + 2})"
            )
        self._cls = TorusModeClass(self.N, grid_n, geometry.grid.lattice)
        self.em_rho = np.ones_like(geometry.u)
        self.e2rho = np.ones_like(geometry.u)

    def mode_class(self, p: int, q: int) -> TorusModeClass:
        _check_class(p, q)
        return self._cls

    def spin(self, p: int, q: int) -> int:
        return 2 * p  # deg N = 0

    def num_modes(self, p: int, q: int) -> int:
        return self.mode_class(p, q).size

    def mode_levels(self, p: int, q: int) -> np.ndarray:
        return self.mode_class(p, q).level_

    def mode_fields(self, p: int, q: int, idx: np.ndarray) -> np.ndarray:
        return self.mode_class(p, q).mode_fields(idx)

    def expand(self, F: np.ndarray, p: int, q: int) -> np.ndarray:
        return self.mode_class(p, q).expand(F)

    def expand_dA(self, F: np.ndarray, p: int, q: int) -> np.ndarray:
        return self.expand(F, p, q)

    def synthesize(self, coeff: np.ndarray, p: int, q: int) -> np.ndarray:
        return self.mode_class(p, q).synthesize(coeff)

    def apply_d1bar(self, F: np.ndarray, p: int, q: int) -> np.ndarray:
        _check_class(p, q)
        _check_class(p + 1, q)
        cls = self._cls
        return cls.synthesize(cls.kappa_ * cls.expand(F))

    def apply_d1(self, F: np.ndarray, p: int, q: int) -> np.ndarray:
        _check_class(p, q)
        _check_class(p - 1, q)
        cls = self._cls
        return cls.synthesize(cls.kappa_prime_ * cls.expand(F))

    def random_section(self, p: int, q: int, level: int, rng: np.random.Generator) -> np.ndarray:
        cls = self.mode_class(p, q)
        mask = cls.level_ <= level
        coeff = np.zeros(cls.size, dtype=complex)
        m = int(np.sum(mask))
        coeff[mask] = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / np.sqrt(2.0 * m)
        return cls.synthesize(coeff)
