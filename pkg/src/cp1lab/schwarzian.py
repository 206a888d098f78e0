"""Schwarzian derivative and transport of the associated linear ODE.

The analytic core: third-order jets of holomorphic maps, the Schwarzian
derivative and its cocycle identity, and transport of u'' + phi u / 2 = 0
along paths in the upper half-plane.  Transport drives the holonomy module;
an independently coded integrator for the osculation 1-form
omega = -phi/2 [[z, -z^2], [1, -z]] dz is kept as a cross-check.
"""

from __future__ import annotations

import cmath
import math

from cp1lab.moebius import ComplexPoint, MobiusMap

# derivative-consistency probes used when constructing analytic maps
_PROBES = (0.31 + 0.87j, -0.22 + 1.13j, 0.57 + 0.64j)

TRANSPORT_TOL = 1e-10
MIN_STEP_FACTOR = 1e-12
MAX_STEPS = 50_000


class AnalyticMap1D:
    """A holomorphic map carried together with derivatives up to order 3.

    jet(z) returns (f, f', f'', f''').  Closed-form constructors cover the
    families used in tests; from_callable falls back to 4-point central
    differences at step 1e-5 (1 + |z|).
    """

    def __init__(self, jet_fn, check_probes=True):
        self._jet = jet_fn
        if check_probes:
            self._check_consistency()

    def jet(self, z):
        return self._jet(complex(z))

    def __call__(self, z):
        return self._jet(complex(z))[0]

    def _check_consistency(self):
        for z in _PROBES:
            try:
                f0, f1, _f2, _f3 = self._jet(z)
                h = 1e-6 * (1.0 + abs(z))
                fd = (self._jet(z + h)[0] - self._jet(z - h)[0]) / (2 * h)
            except (ValueError, ZeroDivisionError, OverflowError):
                continue
            if abs(fd - f1) > 1e-6 * (1.0 + abs(f1)):
                raise ValueError(
                    "jet inconsistent with finite differences at %r" % (z,))

    @classmethod
    def from_mobius(cls, m):
        def jet(z):
            w = m.c * z + m.d
            if abs(w) < 1e-14:
                raise ValueError("jet requested at the pole")
            f = (m.a * z + m.b) / w
            return (f, 1.0 / w ** 2, -2.0 * m.c / w ** 3, 6.0 * m.c ** 2 / w ** 4)
        return cls(jet, check_probes=False)

    @classmethod
    def exp(cls, k=1.0):
        k = complex(k)
        def jet(z):
            e = cmath.exp(k * z)
            return (e, k * e, k * k * e, k ** 3 * e)
        return cls(jet, check_probes=False)

    @classmethod
    def tan(cls):
        def jet(z):
            t = cmath.tan(z)
            s2 = 1.0 + t * t
            return (t, s2, 2.0 * t * s2, 2.0 * s2 * (s2 + 2.0 * t * t))
        return cls(jet, check_probes=False)

    @classmethod
    def power(cls, p):
        p = complex(p)
        def jet(z):
            if abs(z) < 1e-14:
                raise ValueError("jet requested at the branch point")
            f = z ** p
            return (f, p * f / z, p * (p - 1) * f / z ** 2,
                    p * (p - 1) * (p - 2) * f / z ** 3)
        return cls(jet, check_probes=False)

    @classmethod
    def compose(cls, f, g):
        """f o g with derivatives chained to third order."""
        def jet(z):
            g0, g1, g2, g3 = g.jet(z)
            f0, f1, f2, f3 = f.jet(g0)
            return (
                f0,
                f1 * g1,
                f2 * g1 ** 2 + f1 * g2,
                f3 * g1 ** 3 + 3.0 * f2 * g1 * g2 + f1 * g3,
            )
        return cls(jet, check_probes=False)

    @classmethod
    def from_callable(cls, fn, check_probes=True):
        """Numeric jets from central differences.

        Steps are chosen per derivative order: dividing by h^3 amplifies
        rounding by 1/h^3, so the third derivative needs a much larger step
        (plus a sixth-order stencil) than the first to stay near 1e-8.
        """
        def jet(z):
            f0 = fn(z)
            h1 = 1e-5 * (1.0 + abs(z))
            d1 = [fn(z + k * h1) for k in (1, -1, 2, -2)]
            f1 = (8.0 * (d1[0] - d1[1]) - (d1[2] - d1[3])) / (12.0 * h1)
            h2 = 1e-3 * (1.0 + abs(z))
            d2 = [fn(z + k * h2) for k in (1, -1, 2, -2)]
            f2 = (16.0 * (d2[0] + d2[1]) - (d2[2] + d2[3]) - 30.0 * f0) / (12.0 * h2 * h2)
            h3 = 5e-3 * (1.0 + abs(z))
            d3 = [fn(z + k * h3) - fn(z - k * h3) for k in (1, 2, 3)]
            f3 = (-13.0 * d3[0] + 8.0 * d3[1] - d3[2]) / (8.0 * h3 ** 3)
            return (f0, f1, f2, f3)
        return cls(jet, check_probes=check_probes)


def schwarzian_at(f, z):
    """S(f)(z) = f'''/f' - (3/2)(f''/f')^2."""
    _f0, f1, f2, f3 = f.jet(z)
    if abs(f1) < 1e-12:
        raise ValueError("critical point: f'(z) vanishes")
    q = f2 / f1
    return f3 / f1 - 1.5 * q * q


def cocycle_residual(f, g, z):
    """|S(f o g) - [S(f)(g(z)) g'(z)^2 + S(g)(z)]| at z."""
    z = complex(z)
    comp = AnalyticMap1D.compose(f, g)
    g0, g1, _g2, _g3 = g.jet(z)
    lhs = schwarzian_at(comp, z)
    rhs = schwarzian_at(f, g0) * g1 ** 2 + schwarzian_at(g, z)
    return abs(lhs - rhs)


def osculating_map(f, z):
    """The Moebius map with the same 2-jet as f at z."""
    f0, f1, f2, _f3 = f.jet(z)
    if abs(f1) < 1e-12:
        raise ValueError("critical point: f'(z) vanishes")
    s = 1.0 / cmath.sqrt(f1)
    r = -f2 * s ** 3 / 2.0
    q = f0 * s
    p = (1.0 + q * r) / s
    return MobiusMap(p, q - p * z, r, s - r * z, _normalized=True)


# ---------------------------------------------------------------------------
# paths

class PathInH:
    """A path in the upper half-plane with a unit-ish parameterization.

    point(s) and velocity(s) are defined for s in [0, length]; nodes is the
    initial subdivision (parameter values), adaptively refined inside the
    integrator.  Geodesic paths are parameterized by hyperbolic arclength.
    """

    def __init__(self, z0, z1, length, point_fn, velocity_fn, spacing=0.1):
        self.z0 = complex(z0)
        self.z1 = complex(z1)
        self.length = float(length)
        self.point = point_fn
        self.velocity = velocity_fn
        n = max(1, int(math.ceil(self.length / spacing)))
        self.nodes = [self.length * i / n for i in range(n + 1)]
        for s in self.nodes:
            if self.point(s).imag <= 0:
                raise ValueError("path leaves the upper half-plane")

    @classmethod
    def geodesic(cls, z0, z1, spacing=0.1):
        z0, z1 = complex(z0), complex(z1)
        if z0.imag <= 0 or z1.imag <= 0:
            raise ValueError("endpoints must lie in the upper half-plane")
        if abs(z0 - z1) < 1e-15:
            return cls(z0, z1, 0.0, lambda s: z0, lambda s: 0j, spacing)
        if abs(z0.real - z1.real) < 1e-13 * (1 + abs(z0) + abs(z1)):
            x = 0.5 * (z0.real + z1.real)
            sign = 1.0 if z1.imag > z0.imag else -1.0
            y0 = z0.imag
            length = abs(math.log(z1.imag / z0.imag))
            def point(s):
                return complex(x, y0 * math.exp(sign * s))
            def velocity(s):
                return complex(0.0, sign * y0 * math.exp(sign * s))
            return cls(z0, z1, length, point, velocity, spacing)
        xi = (abs(z0) ** 2 - abs(z1) ** 2) / (2.0 * (z0.real - z1.real))
        r = abs(z0 - xi)
        # z(s) = xi + r(-tanh s + i sech s), unit hyperbolic speed
        def param_of(z):
            return math.atanh(max(-1 + 1e-16, min(1 - 1e-16, (xi - z.real) / r)))
        s0, s1 = param_of(z0), param_of(z1)
        sign = 1.0 if s1 > s0 else -1.0
        length = abs(s1 - s0)
        def point(s):
            u = s0 + sign * s
            return complex(xi - r * math.tanh(u), r / math.cosh(u))
        def velocity(s):
            u = s0 + sign * s
            sech = 1.0 / math.cosh(u)
            return sign * complex(-r * sech ** 2, -r * sech * math.tanh(u))
        return cls(z0, z1, length, point, velocity, spacing)

    @classmethod
    def straight(cls, z0, z1, spacing=0.1):
        """Euclidean segment; used by closed-form transport oracles."""
        z0, z1 = complex(z0), complex(z1)
        length = abs(z1 - z0)
        if length < 1e-15:
            return cls(z0, z1, 0.0, lambda s: z0, lambda s: 0j, spacing)
        direction = (z1 - z0) / length
        return cls(z0, z1, length,
                   lambda s: z0 + s * direction,
                   lambda s: direction, spacing)


class TransportMatrix:
    """Determinant-1 transport of (u, u') data along a path."""

    __slots__ = ("m", "steps")

    def __init__(self, m, steps=0, det_tol=1e-9):
        self.m = tuple(complex(x) for x in m)
        self.steps = steps
        if abs(self.det() - 1.0) > det_tol:
            raise ValueError("transport lost the Wronskian: |det - 1| = %.2e"
                             % abs(self.det() - 1.0))

    def det(self):
        a, b, c, d = self.m
        return a * d - b * c

    def matrix(self):
        a, b, c, d = self.m
        return ((a, b), (c, d))

    def compose(self, other):
        """self @ other, applying other first."""
        a, b, c, d = self.m
        e, f, g, h = other.m
        return TransportMatrix(
            (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h),
            self.steps + other.steps,
        )

    def __matmul__(self, other):
        return self.compose(other)

    def apply_data(self, u, du):
        a, b, c, d = self.m
        return (a * u + b * du, c * u + d * du)

    def dist_from_identity(self):
        a, b, c, d = self.m
        return max(abs(a - 1), abs(b), abs(c), abs(d - 1))


# Dormand-Prince 5(4) coefficients
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
          187 / 2100, 1 / 40)


def _axpy(v, steps):
    out = [0j, 0j, 0j, 0j]
    for coeff, k in steps:
        if coeff == 0.0:
            continue
        for i in range(4):
            out[i] += coeff * k[i]
    return (v[0] + out[0], v[1] + out[1], v[2] + out[2], v[3] + out[3])


def _integrate(flux, length, v0, tol, record_at=None, max_steps=MAX_STEPS):
    """Adaptive Dormand-Prince on a 4-component complex system.

    flux(s, v) -> dv/ds.  record_at is a sorted list of parameters at which
    the state is stored; returns (v_end, records, steps).
    """
    if length == 0.0:
        recs = [v0] * len(record_at) if record_at else []
        return v0, recs, 0
    s = 0.0
    v = v0
    h = min(0.1, length)
    min_h = max(length, 1.0) * MIN_STEP_FACTOR
    records = []
    targets = list(record_at) if record_at else []
    ti = 0
    while ti < len(targets) and targets[ti] <= 1e-15:
        records.append(v)
        ti += 1
    steps = 0
    attempts = 0
    while s < length - 1e-15:
        h = min(h, length - s)
        if ti < len(targets):
            h = min(h, targets[ti] - s + 1e-18)
        ks = []
        for stage in range(7):
            vs = _axpy(v, [(h * a, ks[j]) for j, a in enumerate(_DP_A[stage])])
            ks.append(flux(s + _DP_C[stage] * h, vs))
        v5 = _axpy(v, [(h * b, ks[j]) for j, b in enumerate(_DP_B5)])
        v4 = _axpy(v, [(h * b, ks[j]) for j, b in enumerate(_DP_B4)])
        err = max(abs(v5[i] - v4[i]) for i in range(4))
        scale = tol * (1.0 + max(abs(x) for x in v5))
        if err <= scale and err == err:
            s += h
            v = v5
            steps += 1
            while ti < len(targets) and targets[ti] <= s + 1e-12:
                records.append(v)
                ti += 1
        ratio = (scale / err) ** 0.2 if err > 0 else 5.0
        if ratio != ratio:  # NaN from overflow near a singularity
            ratio = 0.2
        h *= min(5.0, max(0.2, 0.9 * ratio))
        attempts += 1
        if h < min_h or attempts > max_steps:
            raise ValueError("step collapse: stiffness or pole suspected")
    while ti < len(targets):
        records.append(v)
        ti += 1
    return v, records, steps


def transport(phi, path, tol=TRANSPORT_TOL):
    """Fundamental-solution transport of u'' + phi u / 2 = 0 along path.

    Returns the TransportMatrix T with (u, u')(end) = T (u, u')(start);
    concatenating paths composes as T2 @ T1.
    """
    def flux(s, v):
        z = path.point(s)
        dz = path.velocity(s)
        p = -0.5 * phi(z) * dz
        return (dz * v[2], dz * v[3], p * v[0], p * v[1])

    v_end, _recs, steps = _integrate(flux, path.length, (1, 0, 0, 1), tol)
    return TransportMatrix(v_end, steps, det_tol=max(1e-9, 100.0 * tol))


def develop(phi, path, seed, tol=TRANSPORT_TOL):
    """Developing map values u1/u2 at path nodes, as projective points.

    seed = (u1, u1', u2, u2') at the start with Wronskian u1' u2 - u1 u2' = 1.
    """
    u1, du1, u2, du2 = (complex(x) for x in seed)
    wr = du1 * u2 - u1 * du2
    if abs(wr - 1.0) > 1e-9:
        raise ValueError("seed Wronskian %r is not 1" % (wr,))

    def flux(s, v):
        z = path.point(s)
        dz = path.velocity(s)
        p = -0.5 * phi(z) * dz
        return (dz * v[2], dz * v[3], p * v[0], p * v[1])

    v0 = (u1, u2, du1, du2)
    _v, recs, _steps = _integrate(flux, path.length, v0, tol,
                                  record_at=path.nodes)
    return [ComplexPoint(r[0], r[1]) for r in recs]


def transport_osculation(phi, path, tol=TRANSPORT_TOL):
    """Transport of the osculation form: P with G(end) = G(start) @ P.

    Integrates dG = G omega with omega = -phi/2 [[z, -z^2], [1, -z]] dz.
    Used as an independent cross-check of the (u, u') transport.
    """
    def flux(s, v):
        z = path.point(s)
        dz = path.velocity(s)
        w = -0.5 * phi(z) * dz
        w00, w01, w10, w11 = w * z, -w * z * z, w, -w * z
        a, b, c, d = v
        return (a * w00 + b * w10, a * w01 + b * w11,
                c * w00 + d * w10, c * w01 + d * w11)

    v_end, _recs, steps = _integrate(flux, path.length, (1, 0, 0, 1), tol)
    return TransportMatrix(v_end, steps, det_tol=max(1e-9, 100.0 * tol))


def solution_frame(transport_matrix, seed, z):
    """Osculating Moebius map of the developing map at a path point.

    seed and the transported data determine V(z) = [[u1, u2], [u1', u2']];
    the osculating map is V^T SW E(z) with SW the column swap and
    E(z) = [[1, -z], [0, 1]].
    """
    u1, du1, u2, du2 = (complex(x) for x in seed)
    a, b, c, d = transport_matrix.m
    v00, v10 = a * u1 + b * du1, c * u1 + d * du1
    v01, v11 = a * u2 + b * du2, c * u2 + d * du2
    # V^T SW = [[v10, v00], [v11, v01]]
    m = MobiusMap(v10, v00, v11, v01, _normalized=False)
    e = MobiusMap(1.0, -z, 0.0, 1.0, _normalized=True)
    return m @ e
