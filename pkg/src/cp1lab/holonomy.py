"""Holonomy representations of projective structures via ODE transport.

For a generator g the solution data of u'' + phi u / 2 = 0 is transported
from the basepoint z0 to g z0 and re-expressed in the frame of twisted
solutions u(gz) g'(z)^-1/2.  The twist matrix at z is K_g(z) = [[s, 0],
[c, 1/s]] with s = c z + d, an exact cocycle in g, so with the seed
U0 = [[z0, 1], [1, 0]] the generator image is

    rho(g) = (U0^-1 K_g(z0) T(z0 -> g z0) U0)^T.

At phi = 0 this returns the group's own generators exactly (not just up
to sign).  Words evaluate as products of generator images; transa parallel
walker that transports over translated generator legs with pulled-back
potentials reproduces those products and serves as the independent
path-versus-product oracle.

Evaluating a Poincare series at every integrator stage would dominate
everything, so each differential caches its values at Chebyshev nodes
along the four generator legs; combinations then cost a short dot product
per stage.  Linearity in the coefficients makes one cache serve a whole
parameter slice.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from cp1lab.moebius import MobiusMap, classify, MobiusClass
from cp1lab.fuchsian import MarkedGroup, bolza_group, invert_word, reduce_word
from cp1lab.quaddiff import DiffBasis, QuadDiff, sup_norm, octagon_samples
from cp1lab.schwarzian import PathInH, TransportMatrix, _integrate

LEG_SPACING = 0.1
CHEB_NODES = 129
ODE_TOL = 1e-10

# residual gate for building representations; the raw shipped basis sits
# near 3e-5 but sup-normalized slices reach ~2e-4, see holonomy_rep
RESIDUAL_GATE = 1e-3

RELATOR_DEFECT_LIMIT = 1e-6

# fixed 12-word character catalog: generators, pairwise products,
# handle commutators
CHARACTER_CATALOG = (
    ("a1", (1,)),
    ("b1", (2,)),
    ("a2", (3,)),
    ("b2", (4,)),
    ("a1b1", (1, 2)),
    ("a1a2", (1, 3)),
    ("a1b2", (1, 4)),
    ("b1a2", (2, 3)),
    ("b1b2", (2, 4)),
    ("a2b2", (3, 4)),
    ("comm1", (1, 2, -1, -2)),
    ("comm2", (3, 4, -3, -4)),
)


class Representation:
    """A homomorphism to PSL(2, C) given by explicit generator images."""

    def __init__(self, group, gen_images, provenance="explicit-generators"):
        if len(gen_images) != 4:
            raise ValueError("expected 4 generator images")
        self.group = group
        self.gen_images = tuple(gen_images)
        self.provenance = provenance
        self._by_letter = {}
        for i, m in enumerate(self.gen_images, start=1):
            self._by_letter[i] = m
            self._by_letter[-i] = m.inverse()

    def __call__(self, word):
        m = MobiusMap.identity()
        for letter in reduce_word(word):
            m = m @ self._by_letter[letter]
        return m

    def relator_defect(self):
        return self(self.group.relator).dist(MobiusMap.identity())

    def character(self):
        return character_of(self)

    def conjugated(self, a):
        return Representation(
            self.group,
            [a @ m @ a.inverse() for m in self.gen_images],
            provenance=self.provenance,
        )


class Character:
    """Squared traces over the fixed word catalog."""

    def __init__(self, values):
        self.values = dict(values)

    def __getitem__(self, label):
        return self.values[label]

    def items(self):
        return self.values.items()

    def distance(self, other):
        return max(abs(self.values[k] - other.values[k])
                   for k in self.values)

    def conjugate(self):
        return Character({k: v.conjugate() for k, v in self.values.items()})

    def to_json(self):
        return {k: [v.real, v.imag] for k, v in self.values.items()}


def character_of(rep):
    vals = {}
    for label, word in CHARACTER_CATALOG:
        vals[label] = rep(word).trace_squared()
    return Character(vals)


# ---------------------------------------------------------------------------
# cached potentials along generator legs

def generator_legs(group):
    """Geodesic paths z0 -> g z0 for the four generators (cached)."""
    legs = getattr(group, "_gen_legs", None)
    if legs is None:
        z0 = group.basepoint
        legs = tuple(
            PathInH.geodesic(z0, g.apply(z0).value(), spacing=LEG_SPACING)
            for g in group.gens
        )
        group._gen_legs = legs
    return legs


class _ChebCache:
    """Barycentric Chebyshev-Lobatto interpolant of phi along one path."""

    def __init__(self, qdiff, path, n=CHEB_NODES):
        js = np.arange(n + 1)
        x = np.cos(js * np.pi / n)
        self.s = 0.5 * path.length * (1.0 - x)
        zs = np.array([path.point(float(sv)) for sv in self.s])
        self.values = qdiff.eval_many(zs)
        self.weights = np.where(js % 2 == 0, 1.0, -1.0)
        self.weights[0] *= 0.5
        self.weights[-1] *= 0.5
        # verify the interpolant against direct evaluation off the nodes
        probes = [0.237 * path.length, 0.611 * path.length]
        direct = qdiff.eval_many(np.array([path.point(s) for s in probes]))
        scale = 1.0 + np.abs(self.values).max()
        for s, want in zip(probes, direct):
            if abs(self.eval(s) - want) > 1e-7 * scale:
                raise ValueError("path cache failed verification")

    def eval(self, s):
        d = s - self.s
        hit = np.argmin(np.abs(d))
        if abs(d[hit]) < 1e-14 * (1.0 + self.s[-1]):
            return self.values[hit]
        r = self.weights / d
        return np.dot(r, self.values) / np.sum(r)


def _leg_caches(qdiff, group):
    caches = getattr(qdiff, "_leg_caches", None)
    if caches is None:
        caches = qdiff._leg_caches = [
            _ChebCache(qdiff, leg) for leg in generator_legs(group)
        ]
    return caches


def _cached_residual(qdiff):
    from cp1lab.quaddiff import equivariance_residual
    r = getattr(qdiff, "_equi_residual", None)
    if r is None:
        r = qdiff._equi_residual = equivariance_residual(qdiff)
    return r


# ---------------------------------------------------------------------------
# frame algebra

def _twist_matrix(m, z):
    """K_g(z) for the half-order twist u -> u(g .) g'^-1/2, as a 2x2 tuple."""
    s = m.c * z + m.d
    return (s, 0j, m.c, 1.0 / s)


def _mat_mul(p, q):
    a, b, c, d = p
    e, f, g, h = q
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _frame_to_rep(group, twist, transport_m):
    """(U0^-1 K T U0)^T as a MobiusMap."""
    z0 = group.basepoint
    u0 = (z0, 1.0 + 0j, 1.0 + 0j, 0j)
    u0_inv = (0j, 1.0 + 0j, 1.0 + 0j, -z0)
    m = _mat_mul(u0_inv, _mat_mul(twist, _mat_mul(transport_m, u0)))
    return MobiusMap(m[0], m[2], m[1], m[3])


def _transport_leg(phi_of_s, path, tol):
    def flux(s, v):
        z = path.point(s)
        dz = path.velocity(s)
        p = -0.5 * phi_of_s(s) * dz
        return (dz * v[2], dz * v[3], p * v[0], p * v[1])

    v, _recs, steps = _integrate(flux, path.length, (1, 0, 0, 1), tol)
    return TransportMatrix(v, steps, det_tol=max(1e-9, 100.0 * tol))


def _normalize_input(group, phi, coeffs):
    if isinstance(phi, DiffBasis):
        diffs = list(phi.diffs)
    elif isinstance(phi, QuadDiff):
        diffs = [phi]
        if coeffs is None:
            coeffs = [1.0]
    else:
        diffs = list(phi)
    if coeffs is None:
        raise ValueError("coefficients required for a basis or list input")
    coeffs = [complex(c) for c in coeffs]
    if len(coeffs) != len(diffs):
        raise ValueError("need one coefficient per differential")
    return diffs, coeffs


def holonomy_rep(group, phi, coeffs=None, ode_tol=ODE_TOL, check=True):
    """Holonomy representation of the projective structure with Schwarzian
    sum_k coeffs[k] phi_k relative to the group's own Fuchsian structure.

    phi may be a DiffBasis, a list of QuadDiff, or a single QuadDiff.  With
    all coefficients zero the generator images equal the group's generators
    to integration accuracy.  Raises if the relator defect exceeds 1e-6.
    """
    diffs, coeffs = _normalize_input(group, phi, coeffs)
    if check and diffs:
        est = sum(abs(c) * _cached_residual(q) * (1.0 + 10.0 * abs(c))
                  for c, q in zip(coeffs, diffs))
        if est >= RESIDUAL_GATE:
            raise ValueError(
                "combined equivariance residual estimate %.2e too large" % est)
    legs = generator_legs(group)
    caches = [_leg_caches(q, group) for q in diffs]
    images = []
    for k, (gen, leg) in enumerate(zip(group.gens, legs)):
        if diffs:
            per_leg = [c[k] for c in caches]
            def phi_of_s(s, _per_leg=per_leg):
                return sum(ck * cache.eval(s)
                           for ck, cache in zip(coeffs, _per_leg))
        else:
            def phi_of_s(s):
                return 0j
        t = _transport_leg(phi_of_s, leg, ode_tol)
        twist = _twist_matrix(gen, group.basepoint)
        images.append(_frame_to_rep(group, twist, t.m))
    rep = Representation(group, images,
                         provenance=("ode-monodromy", tuple(coeffs)))
    defect = rep.relator_defect()
    if defect > RELATOR_DEFECT_LIMIT:
        raise ValueError("relator defect %.2e: integration tolerance "
                         "insufficient" % defect)
    return rep


def word_path_monodromy(group, phi, coeffs, word, ode_tol=ODE_TOL):
    """Monodromy along the concatenated path of a word.

    The path z0 -> w z0 decomposes into translated generator legs; on the
    translate h . leg the potential is the pullback of the base potential,
    so the leg transport is J(h^-1, .)-conjugated.  This walks the whole
    path leg by leg, independently of the generator-product evaluator.
    """
    diffs, coeffs = _normalize_input(group, phi, coeffs)
    word = reduce_word(word)
    legs = generator_legs(group)
    caches = [_leg_caches(q, group) for q in diffs]

    def base_leg_transport(letter):
        k = abs(letter) - 1
        per_leg = [c[k] for c in caches]
        def phi_of_s(s):
            return sum(ck * cache.eval(s)
                       for ck, cache in zip(coeffs, per_leg))
        t = _transport_leg(phi_of_s, legs[k], ode_tol)
        if letter > 0:
            return t.m
        # leg of g^-1 is the g^-1-translate of the reversed forward leg,
        # with the pulled-back potential: conjugate the inverse transport
        a, b, c, d = t.m
        t_inv = (d, -b, -c, a)
        gen = group.gens[k]
        z0 = group.basepoint
        j_end = _twist_matrix(gen, gen.inverse().apply(z0).value())
        ja, jb, jc, jd = _twist_matrix(gen, z0)
        j_start_inv = (jd, -jb, -jc, ja)
        return _mat_mul(j_end, _mat_mul(t_inv, j_start_inv))

    z0 = group.basepoint
    total = (1.0 + 0j, 0j, 0j, 1.0 + 0j)
    prefix = MobiusMap.identity()
    for letter in word:
        t_base = base_leg_transport(letter)
        gen = group._gen_by_letter[letter]
        start = z0
        end = gen.apply(z0).value()
        h = prefix
        hinv = h.inverse()
        j_start = _twist_matrix(hinv, h.apply(start).value())
        j_end = _twist_matrix(hinv, (h @ gen).apply(start).value())
        a, b, c, d = j_start
        j_start_inv = (d, -b, -c, a)
        t_leg = _mat_mul(j_end, _mat_mul(t_base, j_start_inv))
        total = _mat_mul(t_leg, total)
        prefix = prefix @ gen
    twist = _twist_matrix(prefix, z0)
    return _frame_to_rep(group, twist, total)


# ---------------------------------------------------------------------------
# holomorphy of the holonomy map

def holomorphy_residual(group, basis, direction, c0, word, step=1e-4,
                        ode_tol=ODE_TOL):
    """(|dF/dcbar|, |dF/dc|) for F(c) = tr^2 rho_{c phi_k}(word).

    Four-point stencil at c0 with the given step; the antiholomorphic
    derivative of a holomorphic map vanishes, so the first component is a
    direct numerical witness of holomorphy.
    """
    diffs = list(basis.diffs) if isinstance(basis, DiffBasis) else list(basis)
    k = direction

    def f(c):
        coeffs = [0j] * len(diffs)
        coeffs[k] = c
        rep = holonomy_rep(group, diffs, coeffs, ode_tol=ode_tol, check=False)
        return rep(word).trace_squared()

    c0 = complex(c0)
    fx = (f(c0 + step) - f(c0 - step)) / (2.0 * step)
    fy = (f(c0 + 1j * step) - f(c0 - 1j * step)) / (2.0 * step)
    d_bar = 0.5 * (fx + 1j * fy)
    d = 0.5 * (fx - 1j * fy)
    return abs(d_bar), abs(d)


# ---------------------------------------------------------------------------
# normalized slice and JSON rows

def normalized_first_basis_diff(group=None, basis_obj=None, mesh=0.02):
    """phi_1 scaled so its hyperbolic sup norm is 1 (the scan slice)."""
    from cp1lab import quaddiff as qd
    if basis_obj is None:
        basis_obj = qd.basis(group)
    q1 = basis_obj[0]
    norm = sup_norm(q1, octagon_samples(mesh))
    return q1.scaled(1.0 / norm), norm


def holonomy_record(rep, coeffs, tolerances=None):
    """JSON record for one holonomy evaluation: the scan row format."""
    char = rep.character()
    return {
        "c": [[c.real, c.imag] for c in coeffs],
        "character": char.to_json(),
        "relator_defect": rep.relator_defect(),
        "tolerances": tolerances or {"ode_tol": ODE_TOL,
                                     "relator_defect": RELATOR_DEFECT_LIMIT},
    }
