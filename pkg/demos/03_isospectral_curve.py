"""Trace the continuous curve of isospectral quadrilaterals.

The curve lives in (alpha, beta, gamma, delta, c) space and is defined by
keeping the four characteristic-polynomial invariants proportional to the
reference ones (the factor being a power of the homothety parameter c).
The exact method differentiates the invariants with dual numbers; the fd
method uses one-sided difference quotients of the eigenvalues. Both step
with a fixed first-order predictor.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from isoquad import Quadrilateral, assemble, charpoly_invariants, eigenvalues
from isoquad.continuation import CurvePoint, TraceConfig, trace_exact, trace_fd

star = Quadrilateral(-0.2, 1.1, 1.2, 1.3)
start = CurvePoint.from_quad(star)
xi_star = np.array(charpoly_invariants(assemble(star)))
lam_star = eigenvalues(assemble(star))

exact = trace_exact(start, xi_star, TraceConfig(T=0.06, M=100))
rows = exact.rows()
t = np.array([r.t for r in rows])
par = np.array([[r.point.alpha, r.point.beta, r.point.gamma, r.point.delta, r.point.c] for r in rows])
res = np.array([r.residual_norm for r in rows]) / np.linalg.norm(xi_star)
print(f"exact trace: {len(rows)} points, endpoint residuals "
      f"{res[0]:.2e} (t=-T) and {res[-1]:.2e} (t=+T)")
print(f"c ranges over [{par[:, 4].min():.5f}, {par[:, 4].max():.5f}]; c(0) = {par[t == 0, 4][0]}")

fig, axes = plt.subplots(1, 3, figsize=(13, 4))
axes[0].plot(par[:, 0], par[:, 1], "b-", lw=1.5)
axes[0].plot([star.alpha], [star.beta], "r*", ms=12)
axes[0].set_xlabel("alpha"); axes[0].set_ylabel("beta"); axes[0].set_title("V3 projection")
axes[1].plot(par[:, 2], par[:, 3], "b-", lw=1.5)
axes[1].plot([star.gamma], [star.delta], "r*", ms=12)
axes[1].set_xlabel("gamma"); axes[1].set_ylabel("delta"); axes[1].set_title("V4 projection")
axes[2].plot(t, par[:, 4], "b.-", ms=3, lw=0.8)
axes[2].set_xlabel("t"); axes[2].set_ylabel("c")
axes[2].set_title("homothety factor along the curve")

# difference-quotient traces approach the exact projections as M grows
for m, color in ((10, "tab:red"), (30, "tab:orange"), (50, "tab:green")):
    fd = trace_fd(start, lam_star, TraceConfig(T=0.06, M=m, method="fd"))
    rows_fd = fd.rows()
    p = np.array([[r.point.alpha, r.point.beta, r.point.gamma, r.point.delta] for r in rows_fd])
    axes[0].plot(p[:, 0], p[:, 1], ".", color=color, ms=3, label=f"fd M={m}")
    axes[1].plot(p[:, 2], p[:, 3], ".", color=color, ms=3)
axes[0].legend(fontsize=8)
fig.tight_layout()
fig.savefig("isospectral_curve.png", dpi=130)
print("wrote isospectral_curve.png")

# spot check: spectra along the curve match the reference after rescaling
probe = rows[-1].point
lam_end = eigenvalues(assemble(probe.quad()))
print("rescaled endpoint spectrum:", lam_end / probe.c)
print("reference spectrum:        ", lam_star)
