"""Catalogue of nonlinear damping functions and the three-item compliance checker.

A damping function sigma comes with constants C1, C2 and a comparison
function h such that  ||sigma(s) - C1*s||_{S'} <= C2 * h(||s||_S) * <sigma(s), s>_U.
The catalogue covers the identity, norm-level saturation, componentwise
saturations (clamp / tanh / arctan) and the sublinear weak damping
sigma(s) = c * sign(s) * |s|^q with q < 1.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DomainError

KINDS = ("linear", "norm_saturation", "componentwise_saturation", "weak_damping")
SCALAR_RULES = ("clamp", "tanh", "arctan")

# Norm tags: U is the weighted l2 control norm; S the discrete sup norm
# (only meaningful when the damping acts componentwise).
U_EUCLIDEAN = "U_euclidean"
S_SUP = "S_sup"


@dataclass(frozen=True)
class DampingSpec:
    kind: str
    scalar_rule: str = ""
    s0: float = 1.0
    q: float = 0.5
    c: float = 1.0
    C1: float = 1.0
    C2: float = 1.0
    h_kind: str = "constant"          # constant | power | table
    h_table: tuple = ()               # (xs, ys) for h_kind == "table"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown damping kind {self.kind!r}")
        if self.kind == "componentwise_saturation" and self.scalar_rule not in SCALAR_RULES:
            raise ValueError(f"unknown scalar rule {self.scalar_rule!r}")
        if self.kind in ("norm_saturation", "componentwise_saturation") and self.s0 <= 0:
            raise ValueError("saturation level s0 must be > 0")
        if self.kind == "weak_damping":
            if not (0.0 < self.q < 1.0):
                raise ValueError("weak damping exponent q must lie in (0, 1)")
            if self.c < 0.0:
                raise ValueError("weak damping gain c must be >= 0")
        if self.C1 <= 0 or self.C2 <= 0:
            raise ValueError("C1 and C2 must be positive")
        if self.h_kind == "constant" and self.h_eval_scalar_unchecked(0.0) <= 0.0:
            raise ValueError("h(0) must be positive for constant h")

    # --- evaluation ---

    def apply(self, s, u_weights=None):
        """sigma(s) for a vector s; u_weights are the diagonal U-norm weights."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.kind == "linear":
            return s.copy()
        if self.kind == "norm_saturation":
            ns = _u_norm(s, u_weights)
            if ns <= self.s0:
                return s.copy()
            return s * (self.s0 / ns)
        if self.kind == "componentwise_saturation":
            return _scalar_sat(self.scalar_rule, self.s0, s)
        # weak damping: c * sign(s) * |s|^q entrywise
        return self.c * np.sign(s) * np.abs(s) ** self.q

    def h_eval(self, x):
        """h(x) for x >= 0; unbounded at 0 for weak damping (DomainError)."""
        if x < 0:
            raise DomainError("h is defined on x >= 0")
        if self.kind == "weak_damping":
            if x == 0.0:
                raise DomainError("h(x) = x^(q-1) is unbounded at x = 0")
            return float(x ** (self.q - 1.0))
        return self.h_eval_scalar_unchecked(x)

    def h_eval_scalar_unchecked(self, x):
        if self.h_kind == "constant":
            return 1.0
        if self.h_kind == "power":
            return float(x ** (self.q - 1.0)) if x > 0 else np.inf
        xs, ys = self.h_table
        return float(np.interp(x, xs, ys))

    def h_is_constant(self):
        return self.kind != "weak_damping" and self.h_kind == "constant"

    def k_integral(self, X, b_norm):
        """K(X) = int_0^X sqrt(v) h(b_norm sqrt(v)) dv, closed form where possible."""
        if X < 0:
            raise DomainError("K is defined on X >= 0")
        if X == 0.0:
            return 0.0
        if self.h_is_constant():
            return (2.0 / 3.0) * X ** 1.5
        if self.kind == "weak_damping" or self.h_kind == "power":
            # sqrt(v) * (b sqrt(v))^(q-1) = b^(q-1) v^(q/2)
            p = 0.5 * self.q + 1.0
            return float(b_norm ** (self.q - 1.0) * X**p / p)
        val, _ = quad(
            lambda v: np.sqrt(v) * self.h_eval_scalar_unchecked(b_norm * np.sqrt(v)),
            0.0, X, epsabs=0.0, epsrel=1e-10,
        )
        return float(val)

    def sup_output_norm(self, dim, u_weights=None):
        """Bound on ||sigma(s)||_U over all s, or None when sigma is unbounded."""
        if self.kind in ("linear", "weak_damping"):
            return None
        if self.kind == "norm_saturation":
            return self.s0
        w = np.ones(dim) if u_weights is None else np.asarray(u_weights, dtype=float)
        return float(self.s0 * np.sqrt(np.sum(w)))


def _u_norm(s, u_weights):
    if u_weights is None:
        return float(np.linalg.norm(s))
    return float(np.sqrt(np.sum(np.asarray(u_weights) * s * s)))


def _scalar_sat(rule, s0, x):
    if rule == "clamp":
        return np.clip(x, -s0, s0)
    if rule == "tanh":
        return s0 * np.tanh(x / s0)
    return (2.0 * s0 / np.pi) * np.arctan(np.pi * x / (2.0 * s0))


# --- catalogue constructors (defaults satisfy the three-item definition with
#     C1 = 1 and C2 = 1/s0; for weak damping C1 is pinned to the gain c) ---

def linear():
    return DampingSpec(kind="linear", C1=1.0, C2=1.0)


def _check_level(s0):
    if s0 <= 0:
        raise ValueError("saturation level s0 must be > 0")
    return s0


def norm_saturation(s0=1.0):
    return DampingSpec(kind="norm_saturation", s0=_check_level(s0), C1=1.0, C2=1.0 / s0)


def clamp(s0=1.0):
    return DampingSpec(kind="componentwise_saturation", scalar_rule="clamp",
                       s0=_check_level(s0), C1=1.0, C2=1.0 / s0)


def tanh_saturation(s0=1.0):
    return DampingSpec(kind="componentwise_saturation", scalar_rule="tanh",
                       s0=_check_level(s0), C1=1.0, C2=1.0 / s0)


def arctan_saturation(s0=1.0):
    return DampingSpec(kind="componentwise_saturation", scalar_rule="arctan",
                       s0=_check_level(s0), C1=1.0, C2=1.0 / s0)


def weak_damping(c=1.0, q=0.5):
    return DampingSpec(kind="weak_damping", c=c, q=q, C1=c, C2=1.0, h_kind="power")


def from_name(name, **kw):
    table = {
        "linear": linear,
        "norm_saturation": norm_saturation,
        "clamp": clamp,
        "tanh": tanh_saturation,
        "arctan": arctan_saturation,
        "weak": weak_damping,
        "weak_damping": weak_damping,
    }
    if name not in table:
        raise ValueError(f"unknown damping name {name!r}")
    return table[name](**kw)


# --- definition compliance checker ---

@dataclass
class DampingReport:
    """Outcome of the sampled three-item compliance check."""

    kind: str
    lipschitz_ratios: dict = field(default_factory=dict)   # ball radius -> max ratio
    monotonicity_min: float = np.inf
    sector_margin: float = np.inf
    item1_pass: bool = False
    item2_pass: bool = False
    item3_pass: bool = False
    flags: list = field(default_factory=list)
    samples: int = 0

    def rows(self):
        """CSV-ready rows: (item, margin, pass)."""
        worst_ratio = max(self.lipschitz_ratios.values()) if self.lipschitz_ratios else 0.0
        return [
            ("lipschitz_max_ratio", worst_ratio, self.item1_pass),
            ("monotonicity_min", self.monotonicity_min, self.item2_pass),
            ("sector_margin_min", self.sector_margin, self.item3_pass),
        ]

    def text_block(self):
        lines = [f"damping kind: {self.kind}", f"samples: {self.samples}"]
        for r, v in sorted(self.lipschitz_ratios.items()):
            lines.append(f"lipschitz ratio (ball {r}): {v!r}")
        lines.append(f"item 1 (locally Lipschitz, sampled): {'pass' if self.item1_pass else 'FAIL'}")
        lines.append(f"item 2 (monotone) min pairing: {self.monotonicity_min!r} "
                     f"-> {'pass' if self.item2_pass else 'FAIL'}")
        lines.append(f"item 3 (sector inequality) min margin: {self.sector_margin!r} "
                     f"-> {'pass' if self.item3_pass else 'FAIL'}")
        for f in self.flags:
            lines.append(f"flag: {f}")
        return "\n".join(lines)


def _dual_prime_norm(spec, v, u_weights):
    # Componentwise damping pairs the sup norm with its weighted-l1 dual;
    # when S = U the dual norm is the U norm itself.
    w = np.ones(v.shape) if u_weights is None else np.asarray(u_weights, dtype=float)
    if spec.kind in ("componentwise_saturation", "weak_damping"):
        return float(np.sum(w * np.abs(v)))
    return _u_norm(v, u_weights)


def _s_norm(spec, s, u_weights):
    if spec.kind in ("componentwise_saturation", "weak_damping"):
        return float(np.max(np.abs(s))) if s.size else 0.0
    return _u_norm(s, u_weights)


def _apply_rows(spec, S, w):
    """sigma row by row for a (trials, dim) sample block."""
    if spec.kind == "linear":
        return S.copy()
    if spec.kind == "componentwise_saturation":
        return _scalar_sat(spec.scalar_rule, spec.s0, S)
    if spec.kind == "weak_damping":
        return spec.c * np.sign(S) * np.abs(S) ** spec.q
    norms = np.sqrt(np.sum(w * S * S, axis=1, keepdims=True))
    scale = np.where(norms <= spec.s0, 1.0, spec.s0 / np.maximum(norms, 1e-300))
    return S * scale


def verify_definition(spec, dim, trials=1000, seed=0, u_weights=None,
                      s_norm_floor=1e-6):
    """Sampled check of the three definition items; failures land in the report.

    trials >= 100.  For weak damping the sector inequality is evaluated only on
    samples with ||s||_S >= s_norm_floor and the report flags the singular h(0).
    """
    if trials < 100:
        raise ValueError("trials must be >= 100")
    rng = np.random.default_rng(seed)
    w = np.ones(dim) if u_weights is None else np.asarray(u_weights, dtype=float)
    report = DampingReport(kind=spec.kind if spec.kind != "componentwise_saturation"
                           else f"{spec.kind}:{spec.scalar_rule}")
    report.samples = trials

    def u_norms(V):
        return np.sqrt(np.sum(w * V * V, axis=1))

    # item 1: local Lipschitz ratio inside balls of increasing radius
    for radius in (0.1, 1.0, 10.0):
        S1 = rng.uniform(-radius, radius, size=(trials // 3 + 1, dim))
        S2 = S1 + rng.uniform(-0.1 * radius, 0.1 * radius, size=S1.shape)
        d = u_norms(S1 - S2)
        num = u_norms(_apply_rows(spec, S1, w) - _apply_rows(spec, S2, w))
        ok = d > 1e-14
        report.lipschitz_ratios[radius] = float(np.max(num[ok] / d[ok])) if np.any(ok) else 0.0
    report.item1_pass = all(np.isfinite(v) and v < 1e8
                            for v in report.lipschitz_ratios.values())

    # item 2: monotone pairing over random pairs
    scales = 10.0 ** rng.uniform(-3, 2, size=(trials, 1))
    S1 = scales * rng.standard_normal((trials, dim))
    S2 = scales * rng.standard_normal((trials, dim))
    pair = np.sum(w * (_apply_rows(spec, S1, w) - _apply_rows(spec, S2, w))
                  * (S1 - S2), axis=1)
    report.monotonicity_min = float(np.min(pair))
    report.item2_pass = report.monotonicity_min >= -1e-12

    # item 3: sector inequality margin
    scales = 10.0 ** rng.uniform(-3, 2, size=(trials, 1))
    S = scales * rng.standard_normal((trials, dim))
    if spec.kind in ("componentwise_saturation", "weak_damping"):
        s_norms = np.max(np.abs(S), axis=1)
    else:
        s_norms = u_norms(S)
    keep = s_norms > (s_norm_floor if spec.kind == "weak_damping" else 0.0)
    skipped = int(trials - np.sum(keep))
    S, s_norms = S[keep], s_norms[keep]
    sig = _apply_rows(spec, S, w)
    pairing = np.sum(w * sig * S, axis=1)
    diff = sig - spec.C1 * S
    if spec.kind in ("componentwise_saturation", "weak_damping"):
        lhs = np.sum(w * np.abs(diff), axis=1)
    else:
        lhs = u_norms(diff)
    h_vals = np.array([spec.h_eval(x) for x in s_norms])
    report.sector_margin = float(np.min(spec.C2 * h_vals * pairing - lhs))
    report.item3_pass = report.sector_margin >= -1e-12

    if spec.kind == "weak_damping":
        report.flags.append("h(x) = x^(q-1) is unbounded at x = 0; "
                            f"sector check restricted to ||s||_S >= {s_norm_floor!r} "
                            f"({skipped} samples skipped)")
        report.flags.append("sigma is not Lipschitz at 0 (sublinear growth)")
    return report
