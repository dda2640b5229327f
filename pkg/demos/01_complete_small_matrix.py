"""Recover a small nonnegative matrix from 60% of its entries.

The instance is a random 60x50 rank-4 product scaled to be slightly
ill-conditioned.  We sample entries uniformly, hand the solver only
those, and compare the recovered product against the full matrix the
solver never saw.
"""

import numpy as np

from nmfc import default_params, make_problem, solve

observed, prob = make_problem(m=60, n=50, r=4, sr=0.60, seed=7)
print(f"instance: {observed.shape[0]}x{observed.shape[1]}, true rank 4, "
      f"{observed.mask.count} of {60 * 50} entries observed")

params = default_params(observed, q=4, seed=7, tol=1e-7, maxiter=5000)
print(f"penalties: alpha={params.alpha:g} beta={params.beta:g} "
      f"gamma={params.gamma:.6f}")

sol = solve(observed, params)
print(f"stopped by {sol.stop_reason} after {sol.iterations} iterations, "
      f"masked misfit f={sol.final_f:.2e}")

recovered = sol.product()
rel = np.linalg.norm(recovered - prob.M) / np.linalg.norm(prob.M)
print(f"relative error against the hidden full matrix: {rel:.2e}")
print(f"factor ranges: X in [{sol.X.min():.3g}, {sol.X.max():.3g}], "
      f"Y in [{sol.Y.min():.3g}, {sol.Y.max():.3g}]")
print(f"worst negative magnitude clamped on output: {sol.clamp_magnitude:.1e}")

# the same call with factors="uv" returns the projected copies, which
# are nonnegative by construction rather than by clamping
sol_uv = solve(observed, params, factors="uv")
print(f"projected factors: min(X)={sol_uv.X.min():.3g} "
      f"min(Y)={sol_uv.Y.min():.3g}")
