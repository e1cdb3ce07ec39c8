"""When the divergence degree is not a clean power: anomalous scaling.

The foam <a, b, h | [a,h] = [b,h] = 1> has minimum twisted b2 = 2, but the
moduli-space integral behind the Lambda^2 prediction diverges on the Abelian
stratum, so Z_tau does not scale as Lambda^{b2_0}.  The scaling fit must
flag this rather than silently report a clean exponent.  A two-dimensional
toy integral with the same disease, z_tau = int e^{-(xy)^2/tau} over a box,
shows the failure in its simplest form: the true law is sqrt(tau) ln(1/tau).
"""

import numpy as np

from foamtor import fit_scaling, fit_toy, toy_laplace, z_char_appendix

# -- appendix foam: the pure power fit degrades and the log-corrected model
# is preferred, flagging non-monomial scaling
taus = np.logspace(-3, -1, 8)
pts = [z_char_appendix(float(t)) for t in taus]
fit = fit_scaling(pts)
print("appendix foam scaling fit:")
print("  pure-power residual RMS     %.2e" % fit.residual_rms_pure)
print("  with-log residual RMS       %.2e" % fit.residual_rms_withlog)
print("  with-log model selected:    %s" % fit.with_log_correction)
print("  fitted Omega = %.3f  (b2 is 3 on one stratum, 2 on the other)" % fit.omega)

# -- toy Laplace integral: the critical set {xy = 0} has a singular point at
# the origin; a naive transverse Gaussian count predicts sqrt(tau), but the
# transverse width 1/|x| is not integrable, producing the extra logarithm
print("\ntoy integral z_tau on [-1, 1]^2:")
for tau in (1e-2, 1e-4, 1e-6):
    z = toy_laplace(tau)
    print("  tau = %7.0e   z = %.8f   z / sqrt(pi tau) = %8.4f"
          % (tau, z, z / np.sqrt(np.pi * tau)))

fit = fit_toy(np.logspace(-6, -2, 9))
print("fit over tau in [1e-6, 1e-2]:")
print("  selected model:  %s" % ("sqrt(tau) * ln(1/tau)" if fit.with_log_correction
                                 else "pure power"))
print("  Omega = %.6f (exactly -1 for the sqrt(tau) law)" % fit.omega)
print("  with-log RMS %.1e vs pure %.1e" % (fit.residual_rms_withlog,
                                            fit.residual_rms_pure))

# the pure-power exponent drifts with the fit window, the signature of a
# law that no monomial can match
for lo, hi in ((-6, -4), (-4, -2)):
    window = np.logspace(lo, hi, 6)
    vals = [toy_laplace(float(t)) for t in window]
    from foamtor.partition import lambda_tau
    coef = np.polyfit(np.log(lambda_tau(window)), np.log(vals), 1)
    print("  pure fit on [1e%d, 1e%d]: Omega = %.3f" % (lo, hi, coef[0]))
