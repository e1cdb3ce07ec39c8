"""Twisted cochain complex at a (flat) connection and its Betti numbers.

The three-term complex  g -> g^E -> g^F  is assembled in right-trivialized
orthonormal Lie coordinates:

  delta0: edge block  I - Ad(g_e)                 (linearized gauge action)
  delta1: for a face word l_1 ... l_k, the block coupling the face to edge e
          sums +Ad(P_{i-1}) over occurrences l_i = e and -Ad(P_i) over
          occurrences l_i = e^-1, with P_i the product of the first i letters
          (linearized curvature).

At a flat connection delta1 . delta0 = 0, and the twisted Betti numbers are
b0 = dim G - rk delta0, b1 = dim G * E - rk delta0 - rk delta1,
b2 = dim G * F - rk delta1.  Ranks are decided by SVD with a relative
threshold and an explicit spectral-gap diagnostic; a thin gap raises a
warning flag, never a silent answer.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .connection import FlatSample, FLAT_TOL, analytic_flat, \
    find_flat_batch, flatness_residual
from .foam import reduce_foam
from .groups import get_group

EPS_RANK = 1e-9      # relative SVD threshold: sigma counts iff sigma > EPS_RANK * sigma_max
EPS_ABS = 1e-12      # absolute floor: the differentials have O(1) entries (Ad is
                     # orthogonal), so anything below this is rounding noise
GAP_WARN = 1e2       # warn when min(counted)/max(discarded) is below this


def build_delta0(foam, conn):
    """(dim G * E) x (dim G) matrix with edge blocks I - Ad(g_e)."""
    group = conn.group
    d = group.dim_g
    E = foam.E
    out = np.zeros((d * E, d))
    eye = np.eye(d)
    for e in range(E):
        out[d * e:d * e + d, :] = eye - group.adjoint(conn.data[e])
    return out


def build_delta1(foam, conn):
    """(dim G * F) x (dim G * E) word differential (defined at any connection)."""
    group = conn.group
    d = group.dim_g
    E, F = foam.E, foam.F
    out = np.zeros((d * F, d * E))
    for f in range(F):
        P = group.identity()
        for e, s in foam.word_indices(f):
            if s > 0:
                out[d * f:d * f + d, d * e:d * e + d] += group.adjoint(P)
                P = group.mul(P, conn.data[e])
            else:
                P = group.mul(P, group.inv(conn.data[e]))
                out[d * f:d * f + d, d * e:d * e + d] -= group.adjoint(P)
    return out


def _aligned_foam(foam, conn):
    """Reduce a multi-vertex foam and check the connection was built on it."""
    f = foam if foam.is_reduced() else reduce_foam(foam)
    if f.edge_ids != conn.foam.edge_ids:
        raise ValueError("connection does not match (the reduction of) this foam")
    return f


def svd_rank(mat, eps_rank=EPS_RANK, eps_abs=EPS_ABS):
    """(rank, singular values, gap, warn): gap = min(counted)/max(discarded)."""
    if mat.size == 0:
        return 0, np.zeros(0), np.inf, False
    s = np.linalg.svd(mat, compute_uv=False)
    smax = s[0] if len(s) else 0.0
    if smax <= eps_abs:
        return 0, s, np.inf, False
    counted = s > max(eps_rank * smax, eps_abs)
    rank = int(np.sum(counted))
    if rank == len(s):
        gap = np.inf
    else:
        below = s[rank]
        gap = np.inf if below == 0.0 else float(s[rank - 1] / below) if rank else 0.0
    # thin gap around the cut, or counted values hugging the noise floor:
    # either way the rank decision is not trustworthy
    warn = gap < GAP_WARN or (rank > 0 and s[rank - 1] < GAP_WARN * eps_abs)
    return rank, s, gap, warn


@dataclass(frozen=True)
class CohomologyReport:
    rank0: int
    rank1: int
    b0: int
    b1: int
    b2: int
    sv0: np.ndarray = field(compare=False)
    sv1: np.ndarray = field(compare=False)
    gap0: float = np.inf
    gap1: float = np.inf
    euler_ok: bool = True
    regular: bool = False     # b2 == 0 (curvature map submersive)
    reducible: bool = False   # isotropy above the center
    central: bool = False     # rank delta0 == 0
    rank_warning: bool = False

    @property
    def betti(self):
        return (self.b0, self.b1, self.b2)

    def to_json(self):
        return {
            "rank0": self.rank0, "rank1": self.rank1,
            "b0": self.b0, "b1": self.b1, "b2": self.b2,
            "singular_values": {"delta0": list(map(float, self.sv0)),
                                "delta1": list(map(float, self.sv1))},
            "gap": {"delta0": self.gap0, "delta1": self.gap1},
            "euler_ok": self.euler_ok,
            "flags": {"regular": self.regular, "reducible": self.reducible,
                      "central": self.central, "rank_warning": self.rank_warning},
        }


def cohomology(foam, sample, eps_rank=EPS_RANK, flat_tol=FLAT_TOL):
    """Twisted Betti numbers at a flat connection, with rank diagnostics."""
    conn = sample.connection if isinstance(sample, FlatSample) else sample
    foam = _aligned_foam(foam, conn)
    res = flatness_residual(foam, conn)
    if res > flat_tol:
        raise ValueError("connection is not flat (residual %.3e > %.1e)" % (res, flat_tol))
    group = conn.group
    d = group.dim_g
    d0 = build_delta0(foam, conn)
    d1 = build_delta1(foam, conn)
    r0, sv0, gap0, warn0 = svd_rank(d0, eps_rank)
    r1, sv1, gap1, warn1 = svd_rank(d1, eps_rank)
    b0 = d - r0
    b1 = d * foam.E - r0 - r1
    b2 = d * foam.F - r1
    euler_ok = (b0 - b1 + b2) == d * foam.euler
    # b1 < 0 means the two independent rank decisions contradict im d0 < ker d1
    inconsistent = b1 < 0
    return CohomologyReport(
        rank0=r0, rank1=r1, b0=b0, b1=b1, b2=b2, sv0=sv0, sv1=sv1,
        gap0=gap0, gap1=gap1, euler_ok=euler_ok,
        regular=(b2 == 0), reducible=(b0 > group.center_dim), central=(r0 == 0),
        rank_warning=(warn0 or warn1 or inconsistent))


@dataclass(frozen=True)
class MinB2Report:
    b2_0: int
    histogram: dict            # b2 -> count
    strata: dict               # (b0, b2) -> count
    samples: list              # FlatSamples annotated with b0/b2
    rows: tuple = ()           # (b0, b1, b2, tag) per sample
    rank_warnings: int = 0

    @property
    def stratified(self):
        return len(self.strata) > 1

    def histogram_csv(self):
        lines = ["b0,b1,b2,count,tag"]
        for key, c in sorted(Counter(self.rows).items()):
            lines.append("%d,%d,%d,%d,%s" % (key[0], key[1], key[2], c, key[3]))
        return "\n".join(lines) + "\n"


def sample_flat(foam_or_name, group, n_samples, rng, **opts):
    """Flat samples for analysis: analytic families for builtins (torus and
    the three-edge/two-face foam get every component), descent otherwise.

    Descent targets a much deeper residual than the 1e-10 flatness gate so
    that delta1 . delta0, whose entries scale like sqrt(residual), vanishes
    to 1e-10 as well."""
    group = get_group(group)
    if isinstance(foam_or_name, str):
        from .foam import builtin
        foam = builtin(foam_or_name)
    else:
        foam = foam_or_name
    foam = reduce_foam(foam)
    name = foam.name
    samples = []
    if name == "appendix" and group.name == "su2":
        for i in range(n_samples):
            fam = ("irred", "red")[i % 2]
            sgn = +1 if (i // 2) % 2 == 0 else -1
            samples.append(analytic_flat("appendix", rng, group, family=fam, sign=sgn))
    elif name in ("torus", "genus1") and group.name == "su2":
        for i in range(n_samples):
            samples.append(analytic_flat("torus", rng, group, sign=+1 if i % 2 == 0 else -1))
    elif foam.E == 0 or foam.F == 0:
        samples = find_flat_batch(foam, group, rng, n_samples)
    else:
        opts.setdefault("tol", 1e-24)
        samples = find_flat_batch(foam, group, rng, n_samples, on_failure="drop", **opts)
    return foam, samples


def min_b2(foam_or_name, group, n_samples, rng, **opts):
    """Minimum twisted b2 over flat samples, with the stratification histogram.

    Samples whose kernel dimension exceeds the minimum seen within their
    component tag are flagged possibly singular.
    """
    foam, samples = sample_flat(foam_or_name, group, n_samples, rng, **opts)
    if not samples:
        raise RuntimeError("no flat connection found within budget")
    hist = Counter()
    strata = Counter()
    warnings = 0
    kernel_by_tag = {}
    reports = []
    for s in samples:
        rep = cohomology(foam, s)
        reports.append(rep)
        warnings += int(rep.rank_warning)
        hist[rep.b2] += 1
        strata[(rep.b0, rep.b2)] += 1
        tag = s.component_tag or "unknown"
        kernel_by_tag.setdefault(tag, []).append(rep.b1 + rep.rank0)  # dim ker delta1
    flagged = []
    rows = []
    for s, rep in zip(samples, reports):
        tag = s.component_tag or "unknown"
        singular = (rep.b1 + rep.rank0) > min(kernel_by_tag[tag])
        flagged.append(FlatSample(s.connection, s.residual, b0=rep.b0, b2=rep.b2,
                                  component_tag=s.component_tag, possibly_singular=singular))
        rows.append((rep.b0, rep.b1, rep.b2, tag))
    return MinB2Report(
        b2_0=min(hist), histogram=dict(sorted(hist.items())),
        strata=dict(sorted(strata.items())), samples=flagged,
        rows=tuple(rows), rank_warnings=warnings)
