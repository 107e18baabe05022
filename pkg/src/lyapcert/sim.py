"""Time integration of dz/dt = Az - sqrt(k) B sigma(sqrt(k) B* z).

The scheme splits additively: implicit trapezoidal on the (stiff, dissipative)
linear part, explicit midpoint on the globally Lipschitz damping term.  The
linear half is a Cayley transform and therefore a contraction in the system's
energy norm; the integrator aborts if the recorded norm ever grows beyond a
tight tolerance, since that signals a scheme or model inconsistency rather
than a property of the dynamics.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ContractionViolation, StepRejectionLimit

GROWTH_TOL = 1e-10      # per-step admissible relative growth of the state norm
MAX_HALVINGS = 45


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    t_end: float
    error_control: str = "step-halving"       # "none" | "step-halving"
    local_error_target: float = 1e-8          # relative local-error target

    def __post_init__(self):
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be positive")
        if self.error_control not in ("none", "step-halving"):
            raise ValueError("error_control must be 'none' or 'step-halving'")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray                       # shape (len(times), n)
    norm_H: np.ndarray
    norm_DA: np.ndarray
    damping_power: np.ndarray
    V_values: np.ndarray = None
    t_star: float = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @classmethod
    def from_norms(cls, times, norm_H, V_values=None):
        """Norm-only trajectory (fits and CSV round trips)."""
        times = np.asarray(times, dtype=float)
        norm_H = np.asarray(norm_H, dtype=float)
        n = len(times)
        traj = cls(times=times, states=np.zeros((n, 1)), norm_H=norm_H,
                   norm_DA=np.full(n, np.nan), damping_power=np.zeros(n),
                   V_values=None if V_values is None else np.asarray(V_values, float))
        traj.t_star = detect_unit_ball_entry(traj)
        return traj


def smooth_initial_state(system, z0, eps=1e-3):
    """One resolvent application (I - eps A)^{-1} z0; produces strong-solution data."""
    n = system.n
    return np.linalg.solve(np.eye(n) - eps * system.A, np.asarray(z0, dtype=float))


class _Stepper:
    def __init__(self, system, damping):
        self.sys = system
        self.damping = damping
        self.sqrtk = np.sqrt(system.k)
        self.A = system.A
        self.B = system.B
        self.Bstar = system.Bstar
        self._lu = {}

    def control_signal(self, z):
        return self.sqrtk * (self.Bstar @ z)

    def nonlinear(self, z):
        s = self.control_signal(z)
        sig = self.damping.apply(s, self.sys.U_weights)
        return -self.sqrtk * (self.B @ sig)

    def damping_power(self, z):
        s = self.control_signal(z)
        sig = self.damping.apply(s, self.sys.U_weights)
        return float(np.sum(self.sys.U_weights * sig * s))

    def _factor(self, dt):
        key = round(np.log2(dt), 9)
        if key not in self._lu:
            n = self.A.shape[0]
            self._lu[key] = sla.lu_factor(np.eye(n) - 0.5 * dt * self.A)
        return self._lu[key]

    def step(self, z, dt):
        g0 = self.nonlinear(z)
        z_half = z + 0.5 * dt * (self.A @ z + g0)
        rhs = z + 0.5 * dt * (self.A @ z) + dt * self.nonlinear(z_half)
        return sla.lu_solve(self._factor(dt), rhs)


def integrate(system, damping, z0, config, cert=None):
    """Run the closed loop from z0, recording norms, damping power and V.

    Step-halving error control compares one dt step against two dt/2 steps
    (Richardson, second order) and accepts the finer result; dt never grows
    past the configured value and the step count of halvings is capped.
    """
    from .lyapunov import eval_V

    z = np.asarray(z0, dtype=float).copy()
    if not np.all(np.isfinite(z)):
        raise ValueError("initial state must be finite")
    stepper = _Stepper(system, damping)

    times = [0.0]
    states = [z.copy()]
    norm0 = system.norm_H(z)
    norms = [norm0]
    norms_da = [system.norm_DA(z)]
    powers = [stepper.damping_power(z)]
    vvals = [eval_V(cert, z)] if cert is not None else None

    t = 0.0
    dt = min(config.dt, config.t_end)
    adaptive = config.error_control == "step-halving"
    while t < config.t_end - 1e-12 * config.t_end:
        dt = min(dt, config.t_end - t)
        if adaptive:
            halvings = 0
            while True:
                z_big = stepper.step(z, dt)
                z_mid = stepper.step(z, 0.5 * dt)
                z_fine = stepper.step(z_mid, 0.5 * dt)
                err = system.norm_H(z_big - z_fine) / 3.0
                tol = config.local_error_target * max(system.norm_H(z), 1e-9 * norm0)
                if err <= tol:
                    z_new = z_fine
                    break
                dt *= 0.5
                halvings += 1
                if halvings > MAX_HALVINGS:
                    raise StepRejectionLimit(
                        f"local error {err:.3e} above target after {halvings} halvings")
            grow = err <= 0.125 * tol
        else:
            z_new = stepper.step(z, dt)
            grow = False

        n_new = system.norm_H(z_new)
        if n_new > norms[-1] * (1.0 + GROWTH_TOL) + 1e-14 * norm0:
            raise ContractionViolation(
                f"norm grew from {norms[-1]!r} to {n_new!r} at t={t + dt!r}")

        t += dt
        z = z_new
        times.append(t)
        states.append(z.copy())
        norms.append(n_new)
        norms_da.append(system.norm_DA(z))
        powers.append(stepper.damping_power(z))
        if vvals is not None:
            vvals.append(eval_V(cert, z))
        if grow:
            dt = min(2.0 * dt, config.dt)

    traj = Trajectory(times=np.array(times), states=np.array(states),
                      norm_H=np.array(norms), norm_DA=np.array(norms_da),
                      damping_power=np.array(powers),
                      V_values=None if vvals is None else np.array(vvals))
    traj.t_star = detect_unit_ball_entry(traj)
    return traj


def detect_unit_ball_entry(traj):
    """First time the state norm reaches 1, interpolated linearly in log-norm.

    Returns 0.0 when the trajectory starts inside the unit ball and None when
    it never enters.
    """
    norms = traj.norm_H
    if len(norms) == 0:
        raise ValueError("empty trajectory")
    if norms[0] <= 1.0:
        return 0.0
    below = np.nonzero(norms <= 1.0)[0]
    if len(below) == 0:
        return None
    k = int(below[0])
    n_prev, n_k = norms[k - 1], norms[k]
    if n_k <= 0.0:
        return float(traj.times[k])
    frac = np.log(n_prev) / (np.log(n_prev) - np.log(n_k))
    return float(traj.times[k - 1] + frac * (traj.times[k] - traj.times[k - 1]))
