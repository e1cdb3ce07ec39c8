"""Structure-group arithmetic for SU(2) and U(1).

SU(2) is realized as the unit quaternions q = (w, x, y, z) with the Hamilton
product.  Lie-algebra vectors live in R^3 (orthonormal basis {i sigma_1,
i sigma_2, i sigma_3}), the class angle of g = exp(psi n.sigma_vec) is
psi = arccos(w) in [0, pi], and Ad_g is the rotation by 2 psi about the axis
of g.  U(1) elements are angles theta in [0, 2 pi) with Lie algebra R.

The Haar measure is normalized to total mass 1 throughout, so the heat kernel

    K_tau(g) = sum_rho dim(rho) exp(-tau C(rho)) chi_rho(g)

integrates to 1 for every tau.  Two independent evaluators are provided: the
truncated character series and a Poisson-resummed Gaussian image sum over the
cut locus.
"""

from __future__ import annotations

import math

import numpy as np

EPS_LOG = 1e-8          # cut-locus guard for log
UNIT_TOL = 1e-12        # unit-norm tolerance for SU(2) quaternions
HK_TRUNC_C = 12.0       # character series truncated at j_max = ceil(c/sqrt(tau))


class CutLocusError(ValueError):
    """log requested within EPS_LOG of the cut locus (SU(2): g ~ -identity)."""


# ----------------------------------------------------------------------
# vectorized SU(2) primitives (trailing axis of length 4, batch in front)

def su2_mul(a, b):
    w1, x1, y1, z1 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    w2, x2, y2, z2 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    out = np.stack([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ], axis=-1)
    # renormalize to keep long product chains on the unit sphere
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def su2_inv(a):
    out = a.copy()
    out[..., 1:] *= -1.0
    return out


def su2_identity(shape=()):
    out = np.zeros(tuple(shape) + (4,))
    out[..., 0] = 1.0
    return out


def su2_exp(v):
    """exp of a Lie vector v in R^3; |v| is the class angle of the result."""
    v = np.asarray(v, dtype=float)
    th = np.linalg.norm(v, axis=-1, keepdims=True)
    small = th < 1e-12
    sinc = np.where(small, 1.0 - th * th / 6.0, np.sin(th) / np.where(small, 1.0, th))
    return np.concatenate([np.cos(th), sinc * v], axis=-1)


def su2_class_angle(q):
    # atan2 keeps full precision near psi = 0 and pi, unlike arccos(w)
    q = np.asarray(q)
    return np.arctan2(np.linalg.norm(q[..., 1:], axis=-1), q[..., 0])


def su2_log(q, check_cut_locus=True):
    """Inverse of su2_exp; errors within EPS_LOG of the cut locus psi = pi."""
    q = np.asarray(q, dtype=float)
    psi = su2_class_angle(q)
    if check_cut_locus and np.any(psi > np.pi - EPS_LOG):
        raise CutLocusError("log within %g of the cut locus (g ~ -1)" % EPS_LOG)
    vn = np.linalg.norm(q[..., 1:], axis=-1)
    small = vn < 1e-12
    fac = np.where(small, 1.0, psi / np.where(small, 1.0, vn))
    return fac[..., None] * q[..., 1:]


def su2_adjoint(q):
    """Rotation matrix of Ad_q on R^3: rotation by 2 psi about the axis of q."""
    w, x, y, z = (np.asarray(q)[..., i] for i in range(4))
    R = np.empty(np.shape(w) + (3, 3))
    R[..., 0, 0] = 1 - 2 * (y * y + z * z)
    R[..., 0, 1] = 2 * (x * y - z * w)
    R[..., 0, 2] = 2 * (x * z + y * w)
    R[..., 1, 0] = 2 * (x * y + z * w)
    R[..., 1, 1] = 1 - 2 * (x * x + z * z)
    R[..., 1, 2] = 2 * (y * z - x * w)
    R[..., 2, 0] = 2 * (x * z - y * w)
    R[..., 2, 1] = 2 * (y * z + x * w)
    R[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return R


def su2_haar(rng, shape=()):
    """Haar-uniform unit quaternions: four normals, normalized."""
    q = rng.standard_normal(tuple(shape) + (4,))
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def su2_character(j, psi):
    """chi_j at class angle psi: sin((2j+1) psi)/sin(psi), chi_j(1) = 2j+1."""
    n = int(round(2 * j)) + 1
    psi = np.asarray(psi, dtype=float)
    s = np.sin(psi)
    near0 = psi < 1e-5
    nearpi = np.pi - psi < 1e-5
    generic = ~(near0 | nearpi)
    out = np.empty_like(psi)
    out[generic] = np.sin(n * psi[generic]) / s[generic]
    u0 = psi[near0]
    out[near0] = n * (1.0 - (n * n - 1.0) * u0 * u0 / 6.0)
    u1 = np.pi - psi[nearpi]
    out[nearpi] = ((-1.0) ** (n + 1)) * n * (1.0 - (n * n - 1.0) * u1 * u1 / 6.0)
    return out


def _su2_nmax(tau):
    jmax = math.ceil(HK_TRUNC_C / math.sqrt(tau))
    return 2 * jmax + 1


def su2_heat_kernel_series(tau, psi):
    """Truncated character series sum_j (2j+1) e^{-tau j(j+1)} chi_j(psi)."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    psi = np.atleast_1d(np.asarray(psi, dtype=float))
    nmax = _su2_nmax(tau)
    out = np.zeros_like(psi)
    # chunk over n to bound the (len(psi) x nmax) intermediate
    for n0 in range(1, nmax + 1, 512):
        n = np.arange(n0, min(n0 + 512, nmax + 1), dtype=float)
        w = n * np.exp(-tau * (n * n - 1.0) / 4.0)
        s = np.sin(psi)
        near0 = psi < 1e-5
        nearpi = np.pi - psi < 1e-5
        generic = ~(near0 | nearpi)
        if np.any(generic):
            out[generic] += (np.sin(np.outer(psi[generic], n)) @ w) / s[generic]
        if np.any(near0):
            u = psi[near0]
            chi = n - np.outer(u * u, n * (n * n - 1.0) / 6.0)
            out[near0] += chi @ w
        if np.any(nearpi):
            u = np.pi - psi[nearpi]
            sgn = (-1.0) ** (n + 1)
            chi = sgn * (n - np.outer(u * u, n * (n * n - 1.0) / 6.0))
            out[nearpi] += chi @ w
    return out


def su2_heat_kernel_images(tau, psi):
    """Gaussian image sum over the cut locus (Poisson resummation of the series).

    Exact identity:
        K_tau(psi) = e^{tau/4} sqrt(4 pi) tau^{-3/2}
                     sum_k (psi + 2 pi k) e^{-(psi+2 pi k)^2/tau} / sin(psi)
    with Taylor branches where sin(psi) degenerates.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    psi = np.atleast_1d(np.asarray(psi, dtype=float))
    pref = math.exp(tau / 4.0) * math.sqrt(4.0 * math.pi) * tau ** -1.5
    kmax = max(3, int(math.ceil(math.sqrt(45.0 * tau) / (2 * math.pi))) + 2)
    ks = np.arange(-kmax, kmax + 1, dtype=float)

    def f(x):
        return x * np.exp(-x * x / tau)

    def fp(x):
        return (1.0 - 2.0 * x * x / tau) * np.exp(-x * x / tau)

    def fppp(x):
        return (-6.0 / tau + 24.0 * x * x / tau ** 2
                - 8.0 * x ** 4 / tau ** 3) * np.exp(-x * x / tau)

    out = np.empty_like(psi)
    # boundary layers: Taylor at psi = 0 and psi = pi (both numerator and
    # sin(psi) vanish there); cancellation near pi forces a tau-aware cut
    cut_pi = max(1e-7, (1e-14 * tau * tau) ** 0.25)
    near0 = psi < 1e-7
    nearpi = np.pi - psi < cut_pi
    generic = ~(near0 | nearpi)
    if np.any(generic):
        x = psi[generic][:, None] + 2 * np.pi * ks[None, :]
        out[generic] = f(x).sum(axis=1) / np.sin(psi[generic])
    if np.any(near0):
        d1 = fp(2 * np.pi * ks).sum()
        d3 = fppp(2 * np.pi * ks).sum()
        u = psi[near0]
        out[near0] = d1 + u * u * (d3 + d1) / 6.0
    if np.any(nearpi):
        xs = np.pi + 2 * np.pi * ks
        d1 = fp(xs).sum()
        d3 = fppp(xs).sum()
        u = np.pi - psi[nearpi]
        out[nearpi] = -(d1 + u * u * (d3 + d1) / 6.0)
    return pref * out


# ----------------------------------------------------------------------
# U(1): elements are angles in [0, 2 pi), Lie algebra R (trailing axis 1)

def u1_wrap(theta):
    return np.mod(theta, 2.0 * np.pi)


def u1_distance(theta):
    t = u1_wrap(np.asarray(theta, dtype=float))
    return np.minimum(t, 2.0 * np.pi - t)


def u1_heat_kernel_series(tau, theta):
    if tau <= 0:
        raise ValueError("tau must be positive")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    nmax = math.ceil(HK_TRUNC_C / math.sqrt(tau))
    n = np.arange(1, nmax + 1, dtype=float)
    w = np.exp(-tau * n * n)
    return 1.0 + 2.0 * (np.cos(np.outer(theta, n)) @ w)


def u1_heat_kernel_images(tau, theta):
    """Poisson resummation: K_tau(theta) = sqrt(pi/tau) sum_k e^{-(theta+2pi k)^2/4tau}."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    kmax = max(2, int(math.ceil(math.sqrt(180.0 * tau) / (2 * math.pi))) + 2)
    ks = np.arange(-kmax, kmax + 1, dtype=float)
    x = theta[:, None] + 2 * np.pi * ks[None, :]
    return math.sqrt(math.pi / tau) * np.exp(-x * x / (4.0 * tau)).sum(axis=1)


# ----------------------------------------------------------------------
# uniform group interface used by the foam-analysis modules

class SU2:
    """SU(2) as unit quaternions; all methods are vectorized over leading axes."""

    name = "su2"
    dim_g = 3          # dim of the Lie algebra
    elem_dim = 4       # trailing axis length of raw element arrays
    center_dim = 0     # Lie-algebra dimension of the center

    mul = staticmethod(su2_mul)
    inv = staticmethod(su2_inv)
    exp = staticmethod(su2_exp)
    adjoint = staticmethod(su2_adjoint)
    haar = staticmethod(su2_haar)
    identity = staticmethod(su2_identity)

    @staticmethod
    def log(g, check_cut_locus=True):
        return su2_log(g, check_cut_locus=check_cut_locus)

    @staticmethod
    def distance(g):
        """Riemannian distance to the identity = class angle psi in [0, pi]."""
        return su2_class_angle(g)

    @staticmethod
    def character(label, g_or_angle):
        x = np.asarray(g_or_angle, dtype=float)
        psi = su2_class_angle(x) if x.shape and x.shape[-1] == 4 else x
        return su2_character(label, psi)

    @staticmethod
    def casimir(label):
        return label * (label + 1.0)

    @staticmethod
    def dim(label):
        return int(round(2 * label)) + 1

    @staticmethod
    def heat_kernel(tau, g_or_angle, method="auto"):
        x = np.asarray(g_or_angle, dtype=float)
        psi = su2_class_angle(x) if x.shape and x.shape[-1] == 4 else x
        if method == "auto":
            method = "gaussian-images" if tau <= 1.0 else "char-series"
        if method == "char-series":
            return su2_heat_kernel_series(tau, psi)
        if method == "gaussian-images":
            return su2_heat_kernel_images(tau, psi)
        raise ValueError("unknown heat-kernel method %r" % method)

    @staticmethod
    def to_json(data):
        return {"su2": [float(v) for v in np.asarray(data).reshape(4)]}


class U1:

    name = "u1"
    dim_g = 1
    elem_dim = 1
    center_dim = 1     # the whole group is central

    @staticmethod
    def mul(a, b):
        return u1_wrap(a + b)

    @staticmethod
    def inv(a):
        return u1_wrap(-a)

    @staticmethod
    def exp(v):
        return u1_wrap(np.asarray(v, dtype=float))

    @staticmethod
    def log(g, check_cut_locus=True):
        t = u1_wrap(np.asarray(g, dtype=float))
        if check_cut_locus and np.any(np.abs(t - np.pi) < EPS_LOG):
            raise CutLocusError("log within %g of the cut locus (theta = pi)" % EPS_LOG)
        return np.where(t <= np.pi, t, t - 2.0 * np.pi)

    @staticmethod
    def adjoint(g):
        return np.ones(np.asarray(g).shape[:-1] + (1, 1))

    @staticmethod
    def haar(rng, shape=()):
        return rng.uniform(0.0, 2.0 * np.pi, size=tuple(shape) + (1,))

    @staticmethod
    def identity(shape=()):
        return np.zeros(tuple(shape) + (1,))

    @staticmethod
    def distance(g):
        return u1_distance(np.asarray(g)[..., 0])

    @staticmethod
    def character(label, g_or_angle):
        x = np.asarray(g_or_angle, dtype=float)
        theta = x[..., 0] if x.shape and x.shape[-1] == 1 else x
        return np.cos(label * theta)

    @staticmethod
    def casimir(label):
        return float(label) ** 2

    @staticmethod
    def dim(label):
        return 1

    @staticmethod
    def heat_kernel(tau, g_or_angle, method="auto"):
        x = np.asarray(g_or_angle, dtype=float)
        theta = x[..., 0] if x.shape and x.shape[-1] == 1 else x
        if method == "auto":
            method = "gaussian-images" if tau <= 1.0 else "char-series"
        if method == "char-series":
            return u1_heat_kernel_series(tau, theta)
        if method == "gaussian-images":
            return u1_heat_kernel_images(tau, theta)
        raise ValueError("unknown heat-kernel method %r" % method)

    @staticmethod
    def to_json(data):
        return {"u1": float(np.asarray(data).reshape(1)[0])}


GROUPS = {"su2": SU2(), "u1": U1()}


def get_group(name):
    if isinstance(name, (SU2, U1)):
        return name
    try:
        return GROUPS[name.lower()]
    except (KeyError, AttributeError):
        raise ValueError("unknown group %r (expected 'su2' or 'u1')" % (name,)) from None


# ----------------------------------------------------------------------
# scalar wrapper

class GroupElement:
    """A single group element; thin wrapper over the raw array representation."""

    __slots__ = ("group", "data")

    def __init__(self, group, data):
        self.group = get_group(group)
        data = np.asarray(data, dtype=float).reshape(self.group.elem_dim)
        if self.group.name == "su2":
            nrm = np.linalg.norm(data)
            if abs(nrm - 1.0) > 1e-9:
                raise ValueError("quaternion norm %g too far from 1" % nrm)
            if abs(nrm - 1.0) > UNIT_TOL:
                data = data / nrm
        else:
            data = u1_wrap(data)
        self.data = data

    @classmethod
    def identity(cls, group):
        g = get_group(group)
        return cls(g, g.identity())

    @classmethod
    def exp(cls, group, v):
        g = get_group(group)
        return cls(g, g.exp(np.asarray(v, dtype=float).reshape(g.dim_g)))

    @classmethod
    def haar(cls, group, rng):
        g = get_group(group)
        return cls(g, g.haar(rng))

    def __mul__(self, other):
        if self.group is not other.group:
            raise ValueError("elements of different groups")
        return GroupElement(self.group, self.group.mul(self.data, other.data))

    def inverse(self):
        return GroupElement(self.group, self.group.inv(self.data))

    def log(self):
        return self.group.log(self.data)

    def adjoint(self):
        return self.group.adjoint(self.data)

    def distance(self):
        return float(self.group.distance(self.data))

    def class_angle(self):
        return self.distance()

    def allclose(self, other, tol=1e-12):
        return bool(np.max(np.abs(self.data - other.data)) <= tol)

    def to_json(self):
        return self.group.to_json(self.data)

    def __repr__(self):
        return "GroupElement(%s, %s)" % (self.group.name, np.array2string(self.data, precision=6))


def group_element_from_json(obj):
    if "su2" in obj:
        return GroupElement("su2", obj["su2"])
    if "u1" in obj:
        return GroupElement("u1", [obj["u1"]])
    raise ValueError("not a serialized group element: %r" % (obj,))
