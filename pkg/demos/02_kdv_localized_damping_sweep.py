# Semi-discretized third-order dispersive equation (transport + z_xxx) on
# (0, L) closed by a componentwise clamp measured in the sup norm.  Part one
# certifies radius-dependent decay rates for damping localized on a
# subinterval; part two sweeps launch radii under global damping, where the
# fitted tail rates stay flat and a linear-damping control run is exactly
# scale-invariant.

import numpy as np

from lyapcert import analysis, damping, lyapunov, models, sim
from lyapcert.linalg import dissipativity_margin, spectral_abscissa

L = 2.0 * np.pi
local = models.discretize_kdv(L, N=64,
                              a_profile=lambda x: 1.0 if 0.25 * L <= x <= 0.75 * L else 0.0,
                              k=1.0)
print(f"grid: N = {local.grid['N']}, spacing = {local.grid['spacing']:.4f}")
print("dissipativity margin of A:", dissipativity_margin(local.A, local.H_ip))
print("closed-loop spectral abscissa (localized damping):",
      spectral_abscissa(local.closed_loop()))

sat = damping.clamp(s0=1.0)
c_S = models.estimate_cS(local, n_probes=2000, seed=0)
print("estimated embedding constant c_S =", c_S)

print("\ncertified rates shrink with the launch radius:")
for r in (1.0, 5.0, 25.0):
    cert = lyapunov.build_semiglobal_certificate(local, sat, r=r, c_S=c_S)
    print(f"  r = {r:5.1f}: certified mu(r) = {cert.mu:.5f}, M(r) = {cert.M:.3f}")

# sweep under global damping: the observed tail rates sit far above the
# certified ones and stay flat across radii
system = models.discretize_kdv(L, N=64, a_profile=lambda x: 1.0, k=1.0)
cfg = sim.IntegratorConfig(dt=1e-3, t_end=40.0, error_control="none")
sweep = analysis.sweep_semiglobal(system, sat, [1.0, 5.0, 25.0], cfg)
print("\nobserved tail rates (clamped damping, a = 1):")
for r, mu, K, r2 in sweep.rows:
    print(f"  r = {r:5.1f}: mu = {mu:.4f}, prefactor = {K:.3e}, R^2 = {r2:.5f}")
print("nonincreasing within fit noise:", sweep.mu_trend_ok)

control = analysis.sweep_semiglobal(system, damping.linear(), [1.0, 5.0, 25.0], cfg)
mus = [row[1] for row in control.rows]
print(f"\nlinear-damping control: mu spread = {(max(mus) - min(mus)) / min(mus):.2e} "
      "(scale invariance of the linear flow)")
