"""Regularized partition function Z_tau, divergence-exponent fits, toy integral.

Z_tau(foam, G) = int dA prod_f K_tau(H_f(A)) with normalized Haar measure.
Estimators: plain Monte Carlo over Haar-random connections (with standard
errors), the genus-g character sum sum_j (2j+1)^{2-2g} e^{-tau j(j+1)}, and
the exact double character sum for the three-edge/two-face foam.  Scaling is
quantified against Lambda_tau = (4 pi tau)^{-1/2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .foam import reduce_foam
from .groups import get_group

MC_TAU_FLOOR = 0.02


def lambda_tau(tau):
    """The divergence scale Lambda_tau = (4 pi tau)^(-1/2)."""
    return (4.0 * math.pi * np.asarray(tau, dtype=float)) ** -0.5


@dataclass(frozen=True)
class ZEstimate:
    tau: float
    value: float
    stderr: float
    method: str                    # "mc" | "char-surface" | "char-appendix" | "toy"
    meta: dict = field(default_factory=dict)

    def to_json(self):
        return {"tau": self.tau, "value": self.value, "stderr": self.stderr,
                "method": self.method, "meta": self.meta}


def zestimates_csv(points):
    lines = ["tau,lambda_tau,value,stderr,method"]
    for p in points:
        lines.append("%.12g,%.12g,%.15g,%.6g,%s"
                     % (p.tau, float(lambda_tau(p.tau)), p.value, p.stderr, p.method))
    return "\n".join(lines) + "\n"


def zestimates_from_csv(text):
    points = []
    for line in text.strip().splitlines()[1:]:
        tau, _, value, stderr, method = line.split(",")
        points.append(ZEstimate(float(tau), float(value), float(stderr), method))
    return points


# ----------------------------------------------------------------------
# Monte Carlo

def z_mc(foam, group, tau, n_samples, rng=None, seed=None, n_workers=1,
         chunk=100_000):
    """Sample mean of prod_f K_tau(H_f(A)) over A ~ Haar^E.

    Deterministic given a seed: worker w draws from default_rng([seed, w]).
    Below the MC floor the integrand variance swamps 1e7-sample estimates;
    use the character evaluators there.
    """
    if tau < MC_TAU_FLOOR:
        raise ValueError(
            "tau=%g is below the MC floor %g; use a character-sum evaluator"
            % (tau, MC_TAU_FLOOR))
    group = get_group(group)
    foam = reduce_foam(foam)
    words = [foam.word_indices(f) for f in range(foam.F)]
    if foam.E == 0:
        val = 1.0
        for _ in range(foam.F):
            val *= float(group.heat_kernel(tau, group.identity((1,)))[0])
        return ZEstimate(tau, val, 0.0, "mc", {"n_samples": 0, "exact": True})
    if rng is not None and seed is None:
        seed = int(rng.integers(2 ** 63))
    if seed is None:
        raise ValueError("z_mc needs rng or seed")
    per = [n_samples // n_workers] * n_workers
    per[-1] += n_samples - sum(per)
    total = 0.0
    total_sq = 0.0
    n_done = 0
    from .connection import _holonomy_indices
    for w, n_w in enumerate(per):
        wrng = np.random.default_rng([seed, w])
        left = n_w
        while left > 0:
            m = min(chunk, left)
            g = group.haar(wrng, (m, foam.E))
            vals = np.ones(m)
            for word in words:
                h = _holonomy_indices(group, word, g)
                vals *= group.heat_kernel(tau, h)
            total += float(vals.sum())
            total_sq += float((vals * vals).sum())
            n_done += m
            left -= m
    mean = total / n_done
    var = max(total_sq / n_done - mean * mean, 0.0) * n_done / max(n_done - 1, 1)
    stderr = math.sqrt(var / n_done)
    return ZEstimate(tau, mean, stderr, "mc",
                     {"n_samples": n_done, "seed": seed, "n_workers": n_workers})


# ----------------------------------------------------------------------
# character sums (SU(2), normalized Haar: no volume prefactors)

def _theta_images(tau, power):
    """sum_{n>=1} n^power e^{-tau n^2/4} by Poisson resummation (power 0 or 2).

    Exact for tau below ~0.1 where the image corrections e^{-4 pi^2 k^2/tau}
    are at machine precision; used to keep small-tau evaluation O(1).
    """
    a = tau / 4.0
    if power == 0:
        # sum_{n in Z} = sqrt(pi/a) (1 + 2 e^{-pi^2/a} + ...)
        img = sum(2.0 * math.exp(-math.pi ** 2 * k * k / a) for k in range(1, 4))
        return 0.5 * (math.sqrt(math.pi / a) * (1.0 + img) - 1.0)
    if power == 2:
        img = sum(2.0 * (1.0 - 2.0 * math.pi ** 2 * k * k / a)
                  * math.exp(-math.pi ** 2 * k * k / a) for k in range(1, 4))
        return 0.25 * math.sqrt(math.pi) * a ** -1.5 * (1.0 + img)
    raise ValueError(power)


def _surface_sum_direct(g, tau, nmax):
    total = 0.0
    n0 = 1
    while n0 <= nmax:
        n = np.arange(n0, min(n0 + 10 ** 6, nmax + 1), dtype=float)
        total += float(np.sum(n ** (2 - 2 * g) * np.exp(-tau * (n * n - 1.0) / 4.0)))
        n0 += 10 ** 6
    return total


def z_char_surface(g, tau):
    """Character sum for the genus-g surface foam:

        Z_tau = sum_{j in N/2} (2j+1)^{2-2g} e^{-tau j(j+1)}.

    tau = 0 is allowed for g >= 2 where the series converges (Euler-Maclaurin
    tail); for g <= 1 the tau = 0 series diverges.
    """
    if g < 0:
        raise ValueError("genus must be >= 0")
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if tau == 0.0:
        if g <= 1:
            raise ValueError("the tau=0 series diverges for genus <= 1")
        p = 2 * g - 2
        N = 100_000
        n = np.arange(1, N + 1, dtype=float)
        head = float(np.sum(n ** -p))
        tail = (N ** (1 - p) / (p - 1) - 0.5 * N ** -p + p / 12.0 * N ** -(p + 1))
        return ZEstimate(0.0, head + tail, 0.0, "char-surface",
                         {"g": g, "truncation": N, "tail": "euler-maclaurin"})
    nmax = int(math.ceil(2.0 * 12.0 / math.sqrt(tau))) + 1
    if g <= 1 and tau < 0.1:
        ex = math.exp(tau / 4.0)
        val = ex * _theta_images(tau, 0) if g == 1 else ex * _theta_images(tau, 2)
        return ZEstimate(tau, val, 0.0, "char-surface",
                         {"g": g, "evaluator": "poisson-images"})
    val = _surface_sum_direct(g, tau, nmax)
    return ZEstimate(tau, val, 0.0, "char-surface", {"g": g, "truncation": nmax})


def z_char_appendix(tau):
    """Exact double character sum for the foam <a,b,h | [a,h] = [b,h] = 1>:

        Z_tau = sum_{j1,j2} e^{-tau (C(j1)+C(j2))} N(j1,j2),
        N(j1,j2) = dim Inv(j1 x j1 x j2 x j2) = 2 min(j1,j2) + 1.

    Derived from two applications of int da chi_j([a,h]) = |chi_j(h)|^2/(2j+1)
    and validated against plain Monte Carlo (see the test suite).  Evaluated
    as sum_k (sum_{n>=k} e_n)^2 with e_n = e^{-tau (n^2-1)/4}, n = 2j+1.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    nmax = int(math.ceil(2.0 * 14.0 / math.sqrt(tau))) + 1
    n = np.arange(1, nmax + 1, dtype=float)
    e = np.exp(-tau * (n * n - 1.0) / 4.0)
    tails = np.cumsum(e[::-1])[::-1]
    return ZEstimate(tau, float(np.sum(tails * tails)), 0.0, "char-appendix",
                     {"truncation": nmax})


def char_sum_limit(g=1, taus=(1e-4, 1e-5, 1e-6)):
    """Richardson extrapolation of Lambda_tau^{-b2_0} Z_tau as tau -> 0.

    The genus-g exponent is b2_0 = 3, 1, 0 for g = 0, 1, >= 2; the correction
    series is polynomial in sqrt(tau), so a quadratic fit in h = sqrt(tau)
    extrapolates the limit.
    """
    omega = {0: 3, 1: 1}.get(g, 0)
    h = np.sqrt(np.asarray(taus, dtype=float))
    f = np.array([float(lambda_tau(t)) ** -omega * z_char_surface(g, t).value
                  for t in taus])
    coef = np.polyfit(h, f, min(2, len(taus) - 1))
    return float(coef[-1])


# ----------------------------------------------------------------------
# scaling fits

@dataclass(frozen=True)
class ScalingFit:
    omega: float
    log_const: float
    with_log_correction: bool
    residual_rms: float
    residual_rms_pure: float
    residual_rms_withlog: float
    residuals: tuple
    tau_grid: tuple
    coeffs: dict = field(default_factory=dict)

    @property
    def dominant_part(self):
        return math.exp(self.log_const)

    def to_json(self):
        return {"omega": self.omega, "log_const": self.log_const,
                "dominant_part": self.dominant_part,
                "with_log_correction": self.with_log_correction,
                "residual_rms": self.residual_rms,
                "residual_rms_pure": self.residual_rms_pure,
                "residual_rms_withlog": self.residual_rms_withlog,
                "tau_grid": list(self.tau_grid), "coeffs": self.coeffs}


def _wls(X, y, w):
    Xw = X * w[:, None]
    coef, *_ = np.linalg.lstsq(Xw, y * w, rcond=None)
    r = y - X @ coef
    return coef, r


def fit_scaling(points, model="auto", select_factor=5.0):
    """Weighted least squares of log Z against log Lambda_tau.

    model 'pure':     log Z ~ omega log Lambda + c
    model 'with-log': log Z ~ omega log Lambda + beta log log(1/tau) + c
    model 'auto' fits both and prefers with-log iff it reduces the residual
    RMS by select_factor.  Both RMS values are always reported.
    """
    points = sorted(points, key=lambda p: p.tau)
    taus = np.array([p.tau for p in points])
    vals = np.array([p.value for p in points])
    errs = np.array([p.stderr for p in points])
    if len(points) < 4:
        raise ValueError("need at least 4 grid points")
    if taus[-1] / taus[0] < 10.0:
        raise ValueError("tau grid must span at least one decade")
    if np.any(vals <= 0):
        raise ValueError("non-positive partition values cannot be fit in log space")
    x = np.log(lambda_tau(taus))
    y = np.log(vals)
    # weights ~ 1/sigma(log Z); uniform for exact series points
    sig = np.where(errs > 0, errs / vals, 1.0)
    if np.any(errs > 0):
        sig = np.where(errs > 0, sig, sig[errs > 0].min())
    w = 1.0 / sig
    w = w / w.max()

    Xp = np.column_stack([x, np.ones_like(x)])
    cp, rp = _wls(Xp, y, w)
    rms_p = float(np.sqrt(np.mean(rp ** 2)))
    s = np.log(np.log(1.0 / taus))
    Xl = np.column_stack([x, s, np.ones_like(x)])
    cl, rl = _wls(Xl, y, w)
    rms_l = float(np.sqrt(np.mean(rl ** 2)))

    if model == "pure":
        use_log = False
    elif model == "with-log":
        use_log = True
    else:
        use_log = rms_p >= select_factor * rms_l
    if use_log:
        return ScalingFit(float(cl[0]), float(cl[2]), True, rms_l, rms_p, rms_l,
                          tuple(map(float, rl)), tuple(map(float, taus)),
                          {"beta_loglog": float(cl[1])})
    return ScalingFit(float(cp[0]), float(cp[1]), False, rms_p, rms_p, rms_l,
                      tuple(map(float, rp)), tuple(map(float, taus)), {})


# ----------------------------------------------------------------------
# toy Laplace integral with a non-integrable transverse singularity

def toy_laplace(tau, box_halfwidth=1.0, quadrature_n=24):
    """z_tau = int_{[-L,L]^2} e^{-(x y)^2 / tau} dx dy.

    Tensor Gauss-Legendre panels on a geometric grid refined toward the axes
    (the integrand crosses over at |x y| ~ sqrt(tau)).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    L = float(box_halfwidth)
    n_levels = max(4, int(math.ceil(math.log2(L / math.sqrt(tau)))) + 4)
    bounds = [L * 2.0 ** -k for k in range(n_levels + 1)] + [0.0]
    bounds = np.array(bounds[::-1])
    nodes, weights = np.polynomial.legendre.leggauss(quadrature_n)
    xs, ws = [], []
    for a, b in zip(bounds[:-1], bounds[1:]):
        xs.append(0.5 * (b - a) * nodes + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * weights)
    xs = np.concatenate(xs)
    ws = np.concatenate(ws)
    vals = np.exp(-np.outer(xs, xs) ** 2 / tau)
    return 4.0 * float(ws @ vals @ ws)


def fit_toy(taus=None, values=None, box_halfwidth=1.0, select_factor=5.0):
    """Fit the toy integral against the sqrt(tau) log(1/tau) law.

    Pure model:    log z ~ omega log Lambda + c.
    Log-amplitude: log z ~ omega log Lambda + log(beta log(1/tau) + c), the
    sqrt(tau)-times-logarithm law; selected when it beats the pure power by
    select_factor in residual RMS.
    """
    if taus is None:
        taus = np.logspace(-6, -2, 9)
    taus = np.asarray(taus, dtype=float)
    if values is None:
        values = np.array([toy_laplace(t, box_halfwidth) for t in taus])
    vals = np.asarray(values, dtype=float)
    x = np.log(lambda_tau(taus))
    y = np.log(vals)
    s = np.log(1.0 / taus)

    Xp = np.column_stack([x, np.ones_like(x)])
    cp, *_ = np.linalg.lstsq(Xp, y, rcond=None)
    rp = y - Xp @ cp
    rms_p = float(np.sqrt(np.mean(rp ** 2)))

    from scipy.optimize import least_squares

    def resid(p):
        om, beta, c = p
        inner = beta * s + c
        if np.any(inner <= 0):
            return np.full_like(y, 1e3)
        return om * x + np.log(inner) - y

    best = None
    for beta0 in (0.1, 1.0):
        sol = least_squares(resid, [cp[0], beta0, 1.0], method="lm", max_nfev=20000)
        if best is None or sol.cost < best.cost:
            best = sol
    om, beta, c = best.x
    rl = resid(best.x)
    rms_l = float(np.sqrt(np.mean(rl ** 2)))
    use_log = rms_p >= select_factor * rms_l
    if use_log:
        return ScalingFit(float(om), float(math.log(c) if c > 0 else -math.inf), True,
                          rms_l, rms_p, rms_l, tuple(map(float, rl)),
                          tuple(map(float, taus)),
                          {"beta_log": float(beta), "const": float(c),
                           "law": "lambda^omega * (beta ln(1/tau) + c)"})
    return ScalingFit(float(cp[0]), float(cp[1]), False, rms_p, rms_p, rms_l,
                      tuple(map(float, rp)), tuple(map(float, taus)), {})
