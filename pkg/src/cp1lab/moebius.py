"""Determinant-1 Moebius maps on the Riemann sphere, with SL(2,C) lifts.

Points of the sphere are kept in projective coordinates (z : w), so the
point at infinity needs no special-cased arithmetic anywhere.  All maps
are stored normalized to ad - bc = 1; the residual sign ambiguity of the
lift is quotiented out by comparing squared traces or projective actions.
"""

from __future__ import annotations

import cmath
import math

# absolute tolerance on tr^2 used by the classification ladder
CLASSIFY_TOL = 1e-9
DET_TOL = 1e-12


class ComplexPoint:
    """A point of CP^1 as a projective pair (z : w), (z, w) != (0, 0)."""

    __slots__ = ("z", "w")

    def __init__(self, z, w=1.0 + 0.0j):
        z = complex(z)
        w = complex(w)
        s = max(abs(z), abs(w))
        if s == 0.0:
            raise ValueError("projective pair (0, 0) is not a point")
        self.z = z / s
        self.w = w / s

    @classmethod
    def infinity(cls):
        return cls(1.0, 0.0)

    def is_infinity(self, tol=1e-12):
        return abs(self.w) <= tol * abs(self.z)

    def value(self):
        """Affine value z/w; math.inf for the point at infinity."""
        if self.is_infinity():
            return complex(math.inf, 0.0)
        return self.z / self.w

    def approx_eq(self, other, tol=1e-9):
        if not isinstance(other, ComplexPoint):
            other = ComplexPoint(other)
        return abs(self.z * other.w - other.z * self.w) <= tol

    def __repr__(self):
        if self.is_infinity():
            return "ComplexPoint(inf)"
        return "ComplexPoint(%r)" % (self.value(),)


def as_point(p):
    if isinstance(p, ComplexPoint):
        return p
    if p == math.inf:
        return ComplexPoint.infinity()
    return ComplexPoint(p)


class MobiusMap:
    """z -> (az + b)/(cz + d) with ad - bc normalized to 1."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d, _normalized=False):
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        if not _normalized:
            det = a * d - b * c
            scale = max(abs(a), abs(b), abs(c), abs(d)) ** 2
            if abs(det) < max(1e-200, 1e-12 * scale):
                raise ValueError("singular matrix is not a Moebius map")
            s = cmath.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0, _normalized=True)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def trace_squared(self):
        t = self.a + self.d
        return t * t

    def compose(self, other):
        """self o other (matrix product self @ other).

        Products of determinant-1 maps have determinant 1 exactly, so no
        renormalization happens here: recomputing ad - bc is catastrophically
        ill-conditioned once entries are large, while the product entries
        themselves stay accurate in relative terms.
        """
        return MobiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            _normalized=True,
        )

    def __matmul__(self, other):
        return self.compose(other)

    def inverse(self):
        return MobiusMap(self.d, -self.b, -self.c, self.a, _normalized=True)

    def negate(self):
        """The other SL(2,C) lift of the same Moebius map."""
        return MobiusMap(-self.a, -self.b, -self.c, -self.d, _normalized=True)

    def apply(self, p):
        p = as_point(p)
        return ComplexPoint(self.a * p.z + self.b * p.w, self.c * p.z + self.d * p.w)

    def __call__(self, p):
        return self.apply(p)

    def apply_h3(self, point):
        """Action on upper half-space H^3: point = (w, h) with w in C, h > 0."""
        w, h = complex(point[0]), float(point[1])
        den = abs(self.c * w + self.d) ** 2 + abs(self.c) ** 2 * h * h
        wp = ((self.a * w + self.b) * (self.c * w + self.d).conjugate()
              + self.a * self.c.conjugate() * h * h) / den
        return (wp, h / den)

    def matrix(self):
        return ((self.a, self.b), (self.c, self.d))

    def dist(self, other):
        """Entrywise max distance min(|M - N|, |M + N|) (PSL2 distance)."""
        dplus = max(abs(self.a - other.a), abs(self.b - other.b),
                    abs(self.c - other.c), abs(self.d - other.d))
        dminus = max(abs(self.a + other.a), abs(self.b + other.b),
                     abs(self.c + other.c), abs(self.d + other.d))
        return min(dplus, dminus)

    def is_identity(self, tol=CLASSIFY_TOL):
        return self.dist(MobiusMap.identity()) <= tol

    def __repr__(self):
        return "MobiusMap(%r, %r, %r, %r)" % (self.a, self.b, self.c, self.d)


class MobiusClass:
    """Classification tag plus the tr^2 value it was decided on."""

    __slots__ = ("tag", "trace_squared")

    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    LOXODROMIC = "loxodromic"

    def __init__(self, tag, trace_squared):
        self.tag = tag
        self.trace_squared = trace_squared

    def __eq__(self, other):
        if isinstance(other, str):
            return self.tag == other
        return isinstance(other, MobiusClass) and self.tag == other.tag

    def __repr__(self):
        return "MobiusClass(%s, tr2=%r)" % (self.tag, self.trace_squared)


def classify(m, tol=CLASSIFY_TOL):
    """Tolerance ladder: identity, then parabolic, elliptic, loxodromic."""
    t2 = m.trace_squared()
    if m.is_identity(tol):
        return MobiusClass(MobiusClass.IDENTITY, t2)
    if abs(t2 - 4.0) <= tol:
        return MobiusClass(MobiusClass.PARABOLIC, t2)
    if abs(t2.imag) <= tol and 0.0 <= t2.real < 4.0:
        return MobiusClass(MobiusClass.ELLIPTIC, t2)
    return MobiusClass(MobiusClass.LOXODROMIC, t2)


def fixed_points(m):
    """Fixed points on CP^1: roots of c z^2 + (d - a) z - b = 0.

    Loxodromic and elliptic maps give two points, parabolic one.
    Raises for the identity, which fixes everything.
    """
    if m.is_identity():
        raise ValueError("no well-defined fixed-point set for the identity")
    cls = classify(m)
    disc = m.trace_squared() - 4.0
    sq = cmath.sqrt(disc)
    scale = max(abs(m.a), abs(m.b), abs(m.c), abs(m.d))
    if abs(m.c) <= 1e-14 * scale:
        # infinity is fixed
        if cls == MobiusClass.PARABOLIC:
            return [ComplexPoint.infinity()]
        return [ComplexPoint(m.b, m.d - m.a), ComplexPoint.infinity()]
    if cls == MobiusClass.PARABOLIC:
        return [ComplexPoint(m.a - m.d, 2.0 * m.c)]
    return [
        ComplexPoint(m.a - m.d + sq, 2.0 * m.c),
        ComplexPoint(m.a - m.d - sq, 2.0 * m.c),
    ]


def mobius_to_zero_inf_one(p, q, r):
    """The unique Moebius map with p -> 0, q -> infinity, r -> 1."""
    p, q, r = as_point(p), as_point(q), as_point(r)
    num = q.w * r.z - q.z * r.w
    den = p.w * r.z - p.z * r.w
    if abs(den) < 1e-14 or abs(num) < 1e-14:
        raise ValueError("degenerate point triple")
    k = num / den
    return MobiusMap(k * p.w, -k * p.z, q.w, -q.z)


def _third_point(p, q):
    """Deterministic boundary point distinct from p and q (axis frame)."""
    p, q = as_point(p), as_point(q)
    if p.is_infinity():
        return ComplexPoint(q.value() + 1.0)
    if q.is_infinity():
        return ComplexPoint(p.value() + 1.0)
    zp, zq = p.value(), q.value()
    return ComplexPoint(0.5 * (zp + zq) + 0.5j * abs(zp - zq))


def _conjugated_diagonal(p, q, lam):
    """C^-1 diag(lam, 1/lam) C where C sends (p, q, r) -> (0, inf, 1)."""
    p, q = as_point(p), as_point(q)
    if p.approx_eq(q, tol=1e-12):
        raise ValueError("degenerate axis: endpoints coincide")
    cmap = mobius_to_zero_inf_one(p, q, _third_point(p, q))
    diag = MobiusMap(lam, 0.0, 0.0, 1.0 / lam, _normalized=True)
    return cmap.inverse() @ diag @ cmap


def elliptic_about_axis(p, q, t):
    """Elliptic rotation by angle t about the oriented axis (p, q).

    Conjugate to z -> exp(i t) z with p at 0 and q at infinity; reversing
    the axis orientation inverts the map.  tr^2 = 4 cos^2(t/2).
    """
    return _conjugated_diagonal(p, q, cmath.exp(0.5j * t))


def loxodromic_along_axis(p, q, s):
    """Loxodromic with complex length s along (p, q); q is attracting
    for Re s > 0.  Purely imaginary s = i*t is elliptic_about_axis(p, q, t)."""
    return _conjugated_diagonal(p, q, cmath.exp(0.5 * complex(s)))


# ---------------------------------------------------------------------------
# upper half-plane helpers shared by the group and path machinery

def uhp_axis_frame(p, q):
    """A real Moebius map preserving H with p -> 0 and q -> infinity.

    p, q are boundary points (reals or infinity).  The remaining freedom is
    a positive diagonal rescaling, which moves nothing that side tests or
    height ratios depend on.
    """
    p, q = as_point(p), as_point(q)
    if p.approx_eq(q, tol=1e-12):
        raise ValueError("degenerate axis: endpoints coincide")
    if p.is_infinity():
        v = q.value().real
        return MobiusMap(0.0, -1.0, 1.0, -v)
    if q.is_infinity():
        return MobiusMap(1.0, -p.value().real, 0.0, 1.0)
    u, v = p.value().real, q.value().real
    if u > v:
        return MobiusMap(1.0, -u, 1.0, -v)
    return MobiusMap(-1.0, u, 1.0, -v)


def uhp_distance(z1, z2):
    """Hyperbolic distance in the upper half-plane."""
    z1, z2 = complex(z1), complex(z2)
    if z1.imag <= 0 or z2.imag <= 0:
        raise ValueError("points must lie in the open upper half-plane")
    r = abs(z1 - z2) ** 2 / (2.0 * z1.imag * z2.imag)
    return math.acosh(1.0 + r)


def geodesic_endpoints(z1, z2):
    """Ideal endpoints (e_minus, e_plus) of the geodesic through z1, z2,
    ordered so the geodesic runs from e_minus (behind z1) to e_plus
    (beyond z2).  Returns ComplexPoints on R + {inf}."""
    z1, z2 = complex(z1), complex(z2)
    if abs(z1 - z2) < 1e-15:
        raise ValueError("coincident points do not span a geodesic")
    if abs(z1.real - z2.real) < 1e-13 * (1.0 + abs(z1) + abs(z2)):
        x = 0.5 * (z1.real + z2.real)
        if z2.imag > z1.imag:
            return ComplexPoint(x), ComplexPoint.infinity()
        return ComplexPoint.infinity(), ComplexPoint(x)
    xi = (abs(z1) ** 2 - abs(z2) ** 2) / (2.0 * (z1.real - z2.real))
    r = abs(z1 - xi)
    if z1.real < z2.real:
        return ComplexPoint(xi - r), ComplexPoint(xi + r)
    return ComplexPoint(xi + r), ComplexPoint(xi - r)


# ---------------------------------------------------------------------------
# JSON serialization

def mobius_to_json(m):
    return {
        "a": [m.a.real, m.a.imag],
        "b": [m.b.real, m.b.imag],
        "c": [m.c.real, m.c.imag],
        "d": [m.d.real, m.d.imag],
    }


def mobius_from_json(obj):
    vals = {}
    for k in ("a", "b", "c", "d"):
        re, im = obj[k]
        vals[k] = complex(re, im)
    det = vals["a"] * vals["d"] - vals["b"] * vals["c"]
    if abs(det - 1.0) > 1e-9:
        raise ValueError("loaded matrix is not determinant-1")
    return MobiusMap(vals["a"], vals["b"], vals["c"], vals["d"], _normalized=True)
