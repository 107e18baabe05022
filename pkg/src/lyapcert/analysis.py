"""Decay-rate fits, certificate verification along trajectories, the
Gramian chain inequalities for linear flows, semi-global sweeps and the
two-phase (linear then exponential) envelope analysis.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import InsufficientData, NoLinearPhase
from .linalg import matrix_exponential
from .models import leading_eigvec
from .sim import integrate

NOISE_FLOOR = 1e-8


@dataclass
class DecayEstimate:
    model: str                 # exponential | polynomial | linear_phase
    rate: float
    prefactor: float
    window: tuple
    r_squared: float
    slope_bound: float = None
    bound_ok: bool = None

    def row(self):
        return (self.model, self.rate, self.prefactor,
                self.window[0], self.window[1], self.r_squared)


@dataclass
class VerificationReport:
    check: str
    max_violation: float
    tolerance: float
    passed: bool
    samples: int
    details: dict = field(default_factory=dict)

    def row(self):
        return (self.check, self.max_violation, self.tolerance,
                self.passed, self.samples)


def _linear_fit(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot <= 1e-300 else 1.0 - ss_res / ss_tot
    return float(coef[0]), float(coef[1]), r2


def _fit_window(traj, window):
    mask = traj.norm_H > NOISE_FLOOR
    idx = np.nonzero(mask)[0]
    if window is not None:
        t_lo, t_hi = window
        idx = idx[(traj.times[idx] >= t_lo) & (traj.times[idx] <= t_hi)]
    else:
        idx = idx[len(idx) // 2:]        # latter half of the usable samples
    if len(idx) < 10:
        raise InsufficientData(f"{len(idx)} usable samples (need >= 10)")
    return idx


def fit_exponential(traj, window=None):
    """Least-squares fit of log ||z|| vs t; rate is the negated slope."""
    idx = _fit_window(traj, window)
    t = traj.times[idx]
    y = np.log(traj.norm_H[idx])
    slope, intercept, r2 = _linear_fit(t, y)
    return DecayEstimate(model="exponential", rate=-slope,
                         prefactor=float(np.exp(intercept)),
                         window=(float(t[0]), float(t[-1])), r_squared=r2)


def fit_polynomial(traj, window=None):
    """Least-squares fit of log ||z|| vs log(1 + t); rate is the decay exponent."""
    idx = _fit_window(traj, window)
    t = np.log1p(traj.times[idx])
    y = np.log(traj.norm_H[idx])
    slope, intercept, r2 = _linear_fit(t, y)
    return DecayEstimate(model="polynomial", rate=-slope,
                         prefactor=float(np.exp(intercept)),
                         window=(float(traj.times[idx][0]), float(traj.times[idx][-1])),
                         r_squared=r2)


def verify_lyapunov_decrease(traj, cert, tol=None):
    """Per-step check of dV/dt <= -C ||z||_H^2 along a recorded trajectory."""
    if traj.V_values is None:
        raise ValueError("trajectory has no recorded V values")
    V = traj.V_values
    t = traj.times
    if tol is None:
        tol = 1e-4 * V[0]
    rate = np.diff(V) / np.diff(t)
    viol = rate + cert.C * traj.norm_H[:-1] ** 2
    max_violation = float(np.max(viol))
    return VerificationReport(check="lyapunov_decrease",
                              max_violation=max_violation, tolerance=float(tol),
                              passed=max_violation <= tol, samples=len(V) - 1)


def _flow_norm_sq(system, z0, s):
    z = matrix_exponential(system.A, s) @ z0
    return system.norm_H(z) ** 2


def verify_poly_chain(system, P_theta, C, z0, t_grid, tolerance=1e-8,
                      quad_horizon=None):
    """Chain inequalities for the linear flow z(t) = exp(tA) z0.

    (a) <P z(t), z(t)>_H >= C * int_t^inf ||z(s)||_H^2 ds  (tail by quadrature
        plus an exponential remainder from the fitted late-time rate);
    (b) (1 + t) ||z(t)||_H^2 <= (4/C) <P z(t/2), z(t/2)>_H for grid points t >= 1.
    """
    z0 = np.asarray(z0, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    W = system.H_ip.weight
    Gform = W @ np.asarray(P_theta, dtype=float)
    Gform = 0.5 * (Gform + Gform.T)

    if quad_horizon is None:
        from .linalg import spectral_abscissa
        decay = abs(min(spectral_abscissa(system.A), -1e-6))
        quad_horizon = t_grid.max() + 30.0 / decay
    T = float(quad_horizon)
    # late-time decay rate for the quadrature remainder
    nT2 = np.sqrt(_flow_norm_sq(system, z0, 0.5 * T))
    nT = np.sqrt(_flow_norm_sq(system, z0, T))
    if nT > 0 and nT2 > 0 and nT < nT2:
        mu_hat = 2.0 * np.log(nT2 / nT) / T
        remainder = nT**2 / (2.0 * mu_hat)
    else:
        remainder = 0.0

    worst_a = np.inf
    for t in t_grid:
        zt = matrix_exponential(system.A, float(t)) @ z0
        V_t = float(zt @ Gform @ zt)
        tail, _ = quad(lambda s: _flow_norm_sq(system, z0, s), float(t), T,
                       epsabs=1e-12, epsrel=1e-10, limit=400)
        worst_a = min(worst_a, V_t - C * (tail + remainder))

    worst_b = np.inf
    used_b = 0
    for t in t_grid:
        if t < 1.0:
            continue
        used_b += 1
        zt = matrix_exponential(system.A, float(t)) @ z0
        zh = matrix_exponential(system.A, 0.5 * float(t)) @ z0
        V_h = float(zh @ Gform @ zh)
        worst_b = min(worst_b, (4.0 / C) * V_h - (1.0 + t) * system.norm_H(zt) ** 2)

    max_violation = float(max(-worst_a, -worst_b if used_b else -np.inf))
    return VerificationReport(check="poly_chain", max_violation=max_violation,
                              tolerance=float(tolerance),
                              passed=max_violation <= tolerance,
                              samples=len(t_grid),
                              details={"tail_margin": worst_a,
                                       "doubling_margin": worst_b if used_b else None})


def fit_linear_phase(traj, C_sigma, B_norm, tol=0.05):
    """Linear fit of the norm on [0, t*]; slope compared against -2 C_sigma ||B||."""
    if traj.t_star is None or traj.norm_H[0] <= 1.0:
        raise NoLinearPhase("trajectory does not start outside the unit ball")
    mask = traj.times <= traj.t_star
    if int(np.sum(mask)) < 3:
        raise NoLinearPhase("fewer than 3 samples before unit-ball entry")
    t = traj.times[mask]
    slope, intercept, r2 = _linear_fit(t, traj.norm_H[mask])
    bound = -2.0 * C_sigma * B_norm
    return DecayEstimate(model="linear_phase", rate=slope, prefactor=intercept,
                         window=(float(t[0]), float(t[-1])), r_squared=r2,
                         slope_bound=bound,
                         bound_ok=bool(slope >= bound * (1.0 + tol)))


@dataclass
class SweepResult:
    rows: list                      # (r, mu, prefactor, r_squared)
    mu_trend_ok: bool

    def table(self):
        return list(self.rows)


def _relative_tail_window(traj, rel_hi=1e-3, rel_lo=1e-7):
    """Time window where the norm has decayed into (rel_lo, rel_hi) of its start.

    Keyed to the launch level so runs that differ only by scale get the same
    trajectory section; for a linear flow this makes the fitted rate exactly
    scale-invariant.
    """
    n0 = traj.norm_H[0]
    below_hi = np.nonzero(traj.norm_H <= rel_hi * n0)[0]
    t_lo = traj.times[below_hi[0]] if len(below_hi) else traj.times[len(traj.times) // 2]
    below_lo = np.nonzero(traj.norm_H <= rel_lo * n0)[0]
    t_hi = traj.times[below_lo[0]] if len(below_lo) else traj.times[-1]
    return float(t_lo), float(t_hi)


def sweep_semiglobal(system, damping, radii, config, trend_slack=0.2):
    """Integrate from r * zhat for each radius and fit the exponential tail.

    zhat is the closed-loop eigenvector of smallest eigenvalue modulus,
    normalized to unit D(A) norm.  The tail window is taken relative to each
    launch level; mu(r) is expected nonincreasing within the fit-noise slack.
    """
    radii = list(radii)
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and increasing")
    zhat = leading_eigvec(system.closed_loop())
    zhat = zhat / system.norm_DA(zhat)
    rows = []
    for r in radii:
        traj = integrate(system, damping, r * zhat, config)
        est = fit_exponential(traj, window=_relative_tail_window(traj))
        rows.append((float(r), est.rate, est.prefactor, est.r_squared))
    mus = [row[1] for row in rows]
    ok = all(m2 <= m1 * (1.0 + trend_slack) for m1, m2 in zip(mus, mus[1:]))
    return SweepResult(rows=rows, mu_trend_ok=ok)


class DecayBracket:
    """Bracket function F(X) = K(X) + lam_min X, its inverse g and G(x) = int_1^x dv/g."""

    def __init__(self, damping, B_norm, lam_min):
        self.damping = damping
        self.B_norm = B_norm
        self.lam_min = lam_min

    def F(self, X):
        return self.damping.k_integral(X, self.B_norm) + self.lam_min * X

    def g(self, v):
        """Inverse of F by bisection to 1e-10 (absolute + relative)."""
        if v <= 0.0:
            return 0.0
        hi = max(v / max(self.lam_min, 1e-300), 1.0)
        while self.F(hi) < v:
            hi *= 2.0
        return brentq(lambda X: self.F(X) - v, 0.0, hi, xtol=1e-10, rtol=1e-12)

    def G(self, x):
        """int_1^x dv / g(v) by adaptive quadrature."""
        if x == 1.0:
            return 0.0
        val, _ = quad(lambda v: 1.0 / self.g(v), 1.0, x, epsrel=1e-8, limit=200)
        return float(val)


@dataclass
class BehaviorProfile:
    t_star: float
    C3: float
    C4: float
    C_V: float
    pre_ratio: float              # max observed / predicted on [0, t*]
    post_ratio: float             # max observed / predicted after t*
    pre_samples: np.ndarray       # (t, observed, predicted)
    post_samples: np.ndarray


def behavior_profile(traj, damping, B_norm, cert, C3=None, C4=None,
                     n_samples=160):
    """Two-phase envelope: comparison-function bound before unit-ball entry,
    exponential bound after.

    C4 rescales the certificate functional into the bracket F; C3 rescales the
    norm envelope.  Both are calibrated on the given run when not supplied, so
    a smaller-radius run can pin them for larger radii.
    """
    if traj.t_star is None:
        raise NoLinearPhase("trajectory never enters the unit ball")
    lam_min = cert.alpha
    M = cert.M
    P_norm = cert.P_norm_H
    h0 = damping.h_eval(0.0) if damping.kind != "weak_damping" else None
    bracket = DecayBracket(damping, B_norm, lam_min)

    n0 = traj.norm_H[0]
    X0 = n0 * n0

    def F_up(X):
        h_at = damping.h_eval(B_norm * np.sqrt(X)) if B_norm * X > 0 else h0
        return P_norm * X + M * X**1.5 * h_at

    def F_lo(X):
        return lam_min * X + (2.0 * M * h0 / 3.0) * X**1.5

    if C4 is None:
        grid = np.geomspace(1.0, max(X0, 1.0 + 1e-9), 64)
        C4 = float(max(F_up(X) / bracket.F(X) for X in grid))

    V0 = float(traj.V_values[0]) if traj.V_values is not None else F_up(X0)

    # tabulate G on [v_lo, V0/C4] once; the envelope inverts it by interpolation
    v_hi = max(V0 / C4, 1.0 + 1e-9)
    v_grid = np.geomspace(1e-6, v_hi, 300)
    g_vals = np.array([bracket.g(v) for v in v_grid])
    inv_g = 1.0 / np.maximum(g_vals, 1e-300)
    G_grid = np.concatenate([[0.0], np.cumsum(0.5 * (inv_g[1:] + inv_g[:-1])
                                              * np.diff(v_grid))])
    G_grid += bracket.G(v_grid[0])        # anchor at the adaptive-quadrature value

    def G_inv(y):
        y = np.clip(y, G_grid[0], G_grid[-1])
        return float(np.interp(y, G_grid, v_grid))

    G_at_start = float(np.interp(v_hi, v_grid, G_grid))

    def v_pred(t):
        return C4 * G_inv(G_at_start - t / C4)

    def norm_pred(t):
        v = v_pred(t)
        hi = max(X0, 1.0)
        while F_lo(hi) < v:
            hi *= 2.0
        X = brentq(lambda X: F_lo(X) - v, 0.0, hi, xtol=1e-12, rtol=1e-12)
        return np.sqrt(X)

    pre_mask = traj.times <= traj.t_star
    pre_t = traj.times[pre_mask]
    pre_obs = traj.norm_H[pre_mask]
    stride = max(1, len(pre_t) // n_samples)
    pre_t, pre_obs = pre_t[::stride], pre_obs[::stride]
    raw_pred = np.array([norm_pred(t) for t in pre_t])
    if C3 is None:
        C3 = float(np.max(pre_obs / np.maximum(raw_pred, 1e-300)))
    pre_pred = C3 * raw_pred
    pre_ratio = float(np.max(pre_obs / np.maximum(pre_pred, 1e-300)))

    # post-entry: exponential envelope with the in-ball decrease constant
    h_at_B = damping.h_eval(B_norm) if B_norm > 0 else h0
    C_V = 1.0 / (P_norm + M * h_at_B)
    post_mask = traj.times >= traj.t_star
    post_t = traj.times[post_mask]
    post_obs = traj.norm_H[post_mask]
    stride = max(1, len(post_t) // n_samples)
    post_t, post_obs = post_t[::stride], post_obs[::stride]
    amp = np.sqrt((P_norm + M * h_at_B) / lam_min)
    post_pred = amp * np.exp(-0.5 * C_V * (post_t - traj.t_star))
    post_ratio = float(np.max(post_obs / np.maximum(post_pred, 1e-300)))

    return BehaviorProfile(t_star=traj.t_star, C3=C3, C4=C4, C_V=C_V,
                           pre_ratio=pre_ratio, post_ratio=post_ratio,
                           pre_samples=np.column_stack([pre_t, pre_obs, pre_pred]),
                           post_samples=np.column_stack([post_t, post_obs, post_pred]))
