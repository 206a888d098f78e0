"""Collocation-spectral realization of the quadratic differentials.

A holomorphic quadratic differential for the octagon group, written in the
disk model, is P(w) dw^2 with P holomorphic on the disk and

    P(T w) T'(w)^2 = P(w)

for the four side pairings T.  Truncating P to a Taylor polynomial turns
the pairing conditions at points along the identified octagon sides into a
linear system whose numerical nullspace has dimension exactly 3 = dim Q(X).
The three smallest right singular vectors are the basis; their equivariance
residuals sit at the Taylor-tail floor (~1e-9), four to five orders below
any truncated Poincare series at feasible depth.  That headroom is what the
holonomy gates need: relator defects scale like a thousand times the
generator-level equivariance residual.

Evaluation anywhere in H first folds the point into the central octagon
with the group itself (exact equivariance), then sums the polynomial.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from cp1lab.fuchsian import bolza_group, _side_pairing_disk
from cp1lab.moebius import MobiusMap

TAYLOR_DEGREE = 240
POINTS_PER_SIDE = 400
COLUMN_SCALE = 0.85

# disk radius beyond which evaluation folds the point back into the octagon
FOLD_RADIUS = 0.72
_MAX_FOLD_STEPS = 60

# octagon geometry in the disk: side circles and vertices
_R_MID = math.tanh(0.5 * math.acosh(1.0 + math.sqrt(2.0)))
_SIDE_CENTER = (_R_MID + 1.0 / _R_MID) / 2.0
_SIDE_RADIUS = (1.0 / _R_MID - _R_MID) / 2.0
_R_VERTEX = math.tanh(0.5 * math.acosh(3.0 + 2.0 * math.sqrt(2.0)))


def _vertex(j):
    return _R_VERTEX * cmath.exp(1j * (2 * j + 1) * math.pi / 8.0)


def _side_points(j, m):
    """m points along the open side s_j (disk model)."""
    center = _SIDE_CENTER * cmath.exp(1j * j * math.pi / 4.0)
    v1, v2 = _vertex(j - 1), _vertex(j)
    th1 = cmath.phase(v1 - center)
    th2 = cmath.phase(v2 - center)
    # shortest arc between the vertex angles
    dth = (th2 - th1 + math.pi) % (2.0 * math.pi) - math.pi
    return np.array([
        center + _SIDE_RADIUS * cmath.exp(1j * (th1 + dth * (i + 0.5) / m))
        for i in range(m)
    ])


def _apply_disk(abcd, w):
    a, b, c, d = abcd
    return (a * w + b) / (c * w + d)


def _deriv_disk(abcd, w):
    _a, _b, c, d = abcd
    return 1.0 / (c * w + d) ** 2


def _collocation_matrix(degree, per_side):
    pairings = [_side_pairing_disk(k) for k in range(4)]
    rows = []
    for k in range(4):
        us = _side_points(k + 4, per_side)
        tus = _apply_disk(pairings[k], us)
        dfac = _deriv_disk(pairings[k], us) ** 2
        ns = np.arange(degree + 1)
        left = (tus[:, None] / COLUMN_SCALE) ** ns[None, :] * dfac[:, None]
        right = (us[:, None] / COLUMN_SCALE) ** ns[None, :]
        rows.append(left - right)
    return np.vstack(rows)


class SpectralForm:
    """A quadratic differential P(w) dw^2 given by Taylor coefficients of
    P in the scaled disk variable w / COLUMN_SCALE."""

    def __init__(self, coeffs, group=None):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.group = group if group is not None else bolza_group()
        gens = self.group.gens
        self._fold_maps = [g for g in gens] + [g.inverse() for g in gens]

    def _poly(self, w):
        """P(w) for |w| inside the octagon region, vectorized."""
        v = np.asarray(w, dtype=complex) / COLUMN_SCALE
        acc = np.zeros(v.shape, dtype=complex)
        for c in self.coeffs[::-1]:
            acc = acc * v + c
        return acc

    def _fold(self, z):
        """Reduce z into the central octagon; returns (z', dfactor) with
        phi(z) = phi_base(z') * dfactor."""
        dfac = 1.0 + 0j
        w = (z - 1j) / (z + 1j)
        for _ in range(_MAX_FOLD_STEPS):
            if abs(w) <= FOLD_RADIUS:
                break
            best, best_r, best_m = None, abs(w), None
            for m in self._fold_maps:
                zc = m.apply(z).value()
                wc = (zc - 1j) / (zc + 1j)
                if abs(wc) < best_r - 1e-15:
                    best, best_r, best_m = zc, abs(wc), m
            if best is None:
                break
            dfac *= 1.0 / (best_m.c * z + best_m.d) ** 2
            z = best
            w = (z - 1j) / (z + 1j)
        if abs(w) > 0.87:
            raise ValueError("fold failed to reach the central octagon")
        return z, dfac

    def eval_many(self, zs, radius=None):
        """Series values at points of H (radius accepted for interface
        compatibility; folding makes it irrelevant)."""
        zs = np.asarray(zs, dtype=complex)
        flat = zs.ravel()
        w = (flat - 1j) / (flat + 1j)
        out = np.empty(flat.shape, dtype=complex)
        direct = np.abs(w) <= FOLD_RADIUS
        if np.any(direct):
            zd = flat[direct]
            wd = w[direct]
            out[direct] = self._poly(wd) * (-4.0 / (zd + 1j) ** 4)
        for i in np.nonzero(~direct)[0]:
            z, dfac = self._fold(complex(flat[i]))
            wv = (z - 1j) / (z + 1j)
            out[i] = self._poly(wv) * (-4.0 / (z + 1j) ** 4) * dfac ** 2
        return out.reshape(zs.shape)

    def __call__(self, z, radius=None):
        return self.eval_many(np.asarray([z], dtype=complex))[0]

    def scaled(self, factor):
        return SpectralForm(self.coeffs * factor, self.group)

    def to_json(self):
        return {
            "taylor_coefficients": [[c.real, c.imag] for c in self.coeffs],
            "column_scale": COLUMN_SCALE,
        }

    @classmethod
    def from_json(cls, obj, group=None):
        if obj.get("column_scale") != COLUMN_SCALE:
            raise ValueError("coefficient scale mismatch")
        coeffs = [complex(r, i) for r, i in obj["taylor_coefficients"]]
        return cls(np.array(coeffs), group)


def combine(forms, coefficients):
    coeffs = sum(c * f.coeffs for c, f in zip(coefficients, forms))
    return SpectralForm(coeffs, forms[0].group)


def spectral_basis(group=None, degree=TAYLOR_DEGREE, per_side=POINTS_PER_SIDE):
    """Three orthonormal spectral forms plus the singular-value diagnostics.

    Returns (forms, svals) where svals are the last six singular values of
    the collocation matrix: the bottom three belong to the forms, and the
    gap to the fourth certifies that the nullspace dimension is 3.
    """
    if group is None:
        group = bolza_group()
    cache = getattr(group, "_spectral_cache", None)
    if cache is not None:
        return cache
    m = _collocation_matrix(degree, per_side)
    _u, svals, vh = np.linalg.svd(m, full_matrices=False)
    forms = [SpectralForm(np.conj(vh[-1 - i]), group) for i in range(3)]
    result = (forms, svals[-6:])
    if svals[-3] > 1e-6 * svals[0] or svals[-4] < 1e3 * max(svals[-3], 1e-300):
        raise ValueError("collocation nullspace is not cleanly 3-dimensional")
    group._spectral_cache = result
    return result
