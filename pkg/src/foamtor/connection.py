"""Discrete connections on a reduced foam.

A connection assigns a group element to every edge; the holonomy of a face is
the left-to-right product of edge elements with the word's exponents, and a
connection is flat when every face holonomy is the identity.  Flat connections
are produced either by analytic parametrizations (torus, appendix foam) or by
Riemannian gradient descent on the flatness residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .foam import Foam, builtin as _builtin_foam
from .groups import CutLocusError, GroupElement, get_group

FLAT_TOL = 1e-10


class DescentError(RuntimeError):
    """find_flat failed to reach the flat set within its budget."""

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


@dataclass(frozen=True, eq=False)
class Connection:
    """Edge assignment e -> g_e, ordered by the foam's edge list.

    data has shape (E, elem_dim); rows follow foam.edge_ids.
    """

    foam: Foam
    group: object
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "group", get_group(self.group))
        arr = np.asarray(self.data, dtype=float).reshape(self.foam.E, self.group.elem_dim)
        object.__setattr__(self, "data", arr)

    def __getitem__(self, edge_id):
        return GroupElement(self.group, self.data[self.foam.edge_index(edge_id)])

    def to_json(self):
        return {e: self.group.to_json(self.data[i])
                for i, e in enumerate(self.foam.edge_ids)}

    @classmethod
    def identity(cls, foam, group):
        group = get_group(group)
        return cls(foam, group, group.identity((foam.E,)))

    @classmethod
    def haar(cls, foam, group, rng):
        group = get_group(group)
        return cls(foam, group, group.haar(rng, (foam.E,)))


@dataclass(frozen=True, eq=False)
class FlatSample:
    """A connection on the flat set, with its residual and classification."""

    connection: Connection
    residual: float
    b0: int | None = None
    b2: int | None = None
    component_tag: str | None = None
    possibly_singular: bool = False

    def to_json(self):
        return {
            "connection": self.connection.to_json(),
            "residual": self.residual,
            "b0": self.b0,
            "b2": self.b2,
            "component_tag": self.component_tag,
            "possibly_singular": self.possibly_singular,
        }


# ----------------------------------------------------------------------
# holonomy and residual (batched: edge arrays of shape (..., E, elem_dim))

def _holonomy_indices(group, word_idx, g):
    out = group.identity(g.shape[:-2])
    for e, s in word_idx:
        ge = g[..., e, :]
        out = group.mul(out, ge if s > 0 else group.inv(ge))
    return out


def holonomy(foam, conn, f):
    """Holonomy of face f: ordered product of g_e^{+-1} along the face word."""
    h = _holonomy_indices(conn.group, foam.word_indices(f), conn.data)
    return GroupElement(conn.group, h)


def holonomy_word(foam, conn, word):
    """Holonomy of an arbitrary word in the foam's edges (raw element array)."""
    idx = [(foam.edge_index(l.edge), l.exponent) for l in word.letters]
    return _holonomy_indices(conn.group, idx, conn.data)


def _residual_batch(group, words_idx, g):
    res = np.zeros(g.shape[:-2])
    for word_idx in words_idx:
        h = _holonomy_indices(group, word_idx, g)
        d = group.distance(h)
        res = res + d * d
    return res


def flatness_residual(foam, conn):
    """Sum over faces of distance(H_f, 1)^2; zero iff the connection is flat."""
    words = [foam.word_indices(f) for f in range(foam.F)]
    return float(_residual_batch(conn.group, words, conn.data))


def gauge_act(h, conn):
    """Conjugate every edge element by h (single-vertex gauge transformation)."""
    group = conn.group
    hd = h.data if isinstance(h, GroupElement) else np.asarray(h, dtype=float)
    hb = np.broadcast_to(hd, conn.data.shape)
    new = group.mul(group.mul(hb, conn.data), group.inv(hb))
    return Connection(conn.foam, group, new)


# ----------------------------------------------------------------------
# gradient descent to the flat set

def _grad_batch(group, words_idx, g):
    """Right-trivialized gradient of the flatness residual.

    grad_e = 2 sum_f B_{f,e}^T log(H_f) with B the per-occurrence adjoint
    blocks of the linearized curvature (same blocks as the twisted
    differential delta^1 at the current, generally non-flat, point).
    """
    batch = g.shape[:-2]
    E = g.shape[-2]
    grad = np.zeros(batch + (E, group.dim_g))
    res = np.zeros(batch)
    for word_idx in words_idx:
        h = _holonomy_indices(group, word_idx, g)
        L = group.log(h)  # raises CutLocusError near the cut locus
        res = res + np.sum(L * L, axis=-1)
        P = group.identity(batch)
        for e, s in word_idx:
            if s > 0:
                B = group.adjoint(P)
                P = group.mul(P, g[..., e, :])
                grad[..., e, :] += 2.0 * np.einsum("...ij,...i->...j", B, L)
            else:
                P = group.mul(P, group.inv(g[..., e, :]))
                B = group.adjoint(P)
                grad[..., e, :] -= 2.0 * np.einsum("...ij,...i->...j", B, L)
    return res, grad


def _descend(group, words_idx, g, tol, max_iters, step0, rng, retries=10,
             trace=None):
    """Batched monotone descent with backtracking; returns (g, residual, iters).

    The per-sample residual never increases: a step is accepted only if it
    decreases, otherwise the step size is halved.  When trace is a list, the
    residual vector is appended after every iteration.
    """
    n = g.shape[0]
    step = np.full(n, step0)
    for attempt in range(retries + 1):
        try:
            res, grad = _grad_batch(group, words_idx, g)
            break
        except CutLocusError:
            if attempt == retries:
                raise
            g = group.mul(group.exp(rng.normal(scale=0.05, size=g.shape[:-1] + (group.dim_g,))), g)
    iters = 0
    while iters < max_iters and np.any(res > tol):
        upd = group.exp(-step[:, None, None] * grad)
        g_new = group.mul(upd, g)
        try:
            res_new, grad_new = _grad_batch(group, words_idx, g_new)
        except CutLocusError:
            # candidate crossed the cut locus; shrink the step and retry
            step = np.maximum(step * 0.5, 1e-8)
            iters += 1
            continue
        ok = res_new <= res
        sel = ok[:, None, None]
        g = np.where(sel, g_new, g)
        res = np.where(ok, res_new, res)
        grad = np.where(sel, grad_new, grad)
        step = np.where(ok, np.minimum(step * 1.3, 1.0), np.maximum(step * 0.5, 1e-8))
        iters += 1
        if trace is not None:
            trace.append(res.copy())
    return g, res, iters


def find_flat(foam, group, rng, max_iters=5000, step=0.1, tol=FLAT_TOL, start=None):
    """Riemannian gradient descent from a Haar-random start; one sample."""
    samples = find_flat_batch(foam, group, rng, 1, max_iters=max_iters, step=step,
                              tol=tol, starts=None if start is None else start.data[None])
    return samples[0]


def find_flat_batch(foam, group, rng, n, max_iters=5000, step=0.1, tol=FLAT_TOL,
                    starts=None, on_failure="raise", trace=None):
    """n independent descent runs, advanced together for speed.

    on_failure: 'raise' aborts on any non-converged run, 'drop' discards them.
    """
    group = get_group(group)
    if not foam.is_reduced():
        from .foam import reduce_foam
        foam = reduce_foam(foam)
    words_idx = [foam.word_indices(f) for f in range(foam.F)]
    g = group.haar(rng, (n, foam.E)) if starts is None else np.array(starts, dtype=float)
    if foam.E == 0 or foam.F == 0:
        res = _residual_batch(group, words_idx, g)
        return [FlatSample(Connection(foam, group, g[i]), float(res[i])) for i in range(n)]
    g, res, _ = _descend(group, words_idx, g, tol, max_iters, step, rng, trace=trace)
    ok = res <= tol
    if not np.all(ok) and on_failure == "raise":
        raise DescentError(
            "descent failed for %d/%d starts (worst residual %.3e)"
            % (int(np.sum(~ok)), n, float(res.max())), residual=float(res.max()))
    return [FlatSample(Connection(foam, group, g[i]), float(res[i]))
            for i in range(n) if ok[i]]


# ----------------------------------------------------------------------
# analytic flat families for the builtin foams

def _unit_vector(rng, axis=None):
    if axis is not None:
        v = np.asarray(axis, dtype=float)
        return v / np.linalg.norm(v)
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def analytic_flat(foam_name, rng, group="su2", psi_a=None, psi_b=None, psi_h=None,
                  axis=None, sign=+1, family=None, **descent_opts):
    """Exact flat samples on the builtin foams.

    torus: a = exp(psi_a n), b = exp(+-psi_b n) about a common axis n; the sign
    selects the branch.  appendix: family 'irred' has h = +-1 with (a, b) Haar
    random, family 'red' puts a, b, h on a common axis.  sphere: any start is
    flat.  genus g >= 2 falls back to descent.
    """
    group = get_group(group)
    key = foam_name.lower()
    if key in ("torus", "genus:1"):
        foam = _builtin_foam("torus")
        if group.name == "u1":
            data = group.haar(rng, (2,))
            conn = Connection(foam, group, data)
        else:
            n = _unit_vector(rng, axis)
            pa = rng.uniform(0.15, np.pi - 0.15) if psi_a is None else float(psi_a)
            pb = rng.uniform(0.15, np.pi - 0.15) if psi_b is None else float(psi_b)
            a = group.exp(pa * n)
            b = group.exp(float(sign) * pb * n)
            conn = Connection(foam, group, np.stack([a, b]))
        res = flatness_residual(foam, conn)
        return FlatSample(conn, res, component_tag="torus:%s" % ("+" if sign > 0 else "-"))
    if key == "appendix":
        foam = _builtin_foam("appendix")
        if group.name != "su2":
            raise ValueError("analytic appendix families are SU(2)-specific")
        fam = family or "irred"
        if fam == "irred":
            a = group.haar(rng)
            b = group.haar(rng)
            h = group.identity() * float(sign)  # +-identity quaternion
            conn = Connection(foam, group, np.stack([a, b, h]))
        elif fam == "red":
            n = _unit_vector(rng, axis)
            pa = rng.uniform(0.15, np.pi - 0.15) if psi_a is None else float(psi_a)
            pb = rng.uniform(0.15, np.pi - 0.15) if psi_b is None else float(psi_b)
            ph = rng.uniform(0.15, np.pi - 0.15) if psi_h is None else float(psi_h)
            conn = Connection(foam, group,
                              np.stack([group.exp(pa * n), group.exp(pb * n),
                                        group.exp(ph * n)]))
        else:
            raise ValueError("appendix family must be 'irred' or 'red'")
        return FlatSample(conn, flatness_residual(foam, conn), component_tag=fam)
    if key in ("sphere", "genus:0"):
        foam = _builtin_foam("sphere")
        conn = Connection.haar(foam, group, rng)
        return FlatSample(conn, 0.0, component_tag="sphere")
    if key.startswith("genus:"):
        foam = _builtin_foam(key)
        return find_flat(foam, group, rng, **descent_opts)
    raise ValueError("no analytic flat family for %r" % foam_name)
