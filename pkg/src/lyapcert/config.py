"""Experiment configuration: INI-style grammar, validation, serialization.

Grammar: `[section]` headers, `key = value` lines, `#` starts a comment,
blank lines ignored.  Values parse as int, float, comma-separated list,
semicolon-separated matrix rows, or fall back to (possibly spaced) strings.
Every semantic violation is collected and reported together with the line
number where the key was set.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError

SECTIONS = ("system", "damping", "sim", "analysis", "output")
SUBCOMMAND_DEFAULTS = {
    "sim": {"dt": 1e-3, "error_control": "on", "local_error_target": 1e-8,
            "t_end": 10.0},
    "damping": {"kind": "linear", "s0": 1.0, "q": 0.5, "c": 1.0,
                "verify_dim": 4, "verify_trials": 1000},
    "analysis": {"fits": ["exponential"]},
    "output": {"directory": "out", "formats": ["csv"]},
}
DAMPING_KINDS = ("linear", "norm_saturation", "clamp", "tanh", "arctan", "weak")
SYSTEM_NAMES = ("finite_dim", "kdv", "wave")


@dataclass
class ExperimentConfig:
    system: dict = field(default_factory=dict)
    damping: dict = field(default_factory=dict)
    sim: dict = field(default_factory=dict)
    analysis: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)     # (section, key) -> line number
    base_dir: str = "."                           # anchor for file references

    def section(self, name):
        return getattr(self, name)

    def get(self, section, key, default=None):
        return self.section(section).get(key, default)


def _parse_scalar(tok):
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        pass
    return tok


def _parse_value(text):
    text = text.strip()
    if ";" in text:
        rows = [[_parse_scalar(t.strip()) for t in row.split(",")]
                for row in text.split(";") if row.strip()]
        return np.array(rows, dtype=float)
    if "," in text:
        return [_parse_scalar(t.strip()) for t in text.split(",") if t.strip()]
    return _parse_scalar(text)


def parse_config(text):
    """Parse and validate; raises ParseError (syntax) or ValidationError."""
    cfg = ExperimentConfig()
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"line {lineno}: unterminated section header")
            name = line[1:-1].strip()
            if name not in SECTIONS:
                raise ParseError(f"line {lineno}: unknown section [{name}]")
            section = name
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value'")
        if section is None:
            raise ParseError(f"line {lineno}: assignment before any [section]")
        key, val = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ParseError(f"line {lineno}: empty key")
        cfg.section(section)[key] = _parse_value(val)
        cfg.lines[(section, key)] = lineno

    for sect, defaults in SUBCOMMAND_DEFAULTS.items():
        for k, v in defaults.items():
            cfg.section(sect).setdefault(k, v)

    problems = validate(cfg)
    if problems:
        raise ValidationError(problems)
    return cfg


def validate(cfg):
    problems = []

    def where(sect, key):
        ln = cfg.lines.get((sect, key))
        return f" (line {ln})" if ln is not None else ""

    def bad(sect, key, msg):
        problems.append(f"[{sect}] {key}: {msg}{where(sect, key)}")

    name = cfg.get("system", "name")
    if name is None:
        bad("system", "name", "required; one of " + "|".join(SYSTEM_NAMES))
    elif name not in SYSTEM_NAMES:
        bad("system", "name", f"unknown system {name!r}")
    if name in ("kdv", "wave"):
        N = cfg.get("system", "N")
        if not isinstance(N, int) or N < 16:
            bad("system", "N", f"must be an integer >= 16, got {N!r}")
    if name == "kdv":
        L = cfg.get("system", "L", 2 * np.pi)
        if not isinstance(L, (int, float)) or L <= 0:
            bad("system", "L", f"must be positive, got {L!r}")
    k = cfg.get("system", "k", 1.0)
    if not isinstance(k, (int, float)) or k <= 0:
        bad("system", "k", f"must be positive, got {k!r}")
    prof = cfg.get("system", "a_profile")
    if prof is not None and name in ("kdv", "wave"):
        toks = str(prof).split()
        if toks[0] not in ("constant", "indicator"):
            bad("system", "a_profile", "expected 'constant c' or 'indicator lo hi amplitude'")
        elif toks[0] == "constant" and len(toks) != 2:
            bad("system", "a_profile", "constant profile takes one amplitude")
        elif toks[0] == "indicator" and len(toks) != 4:
            bad("system", "a_profile", "indicator profile takes lo hi amplitude")

    kind = cfg.get("damping", "kind")
    if kind not in DAMPING_KINDS:
        bad("damping", "kind", f"unknown kind {kind!r}; one of " + "|".join(DAMPING_KINDS))
    s0 = cfg.get("damping", "s0")
    if not isinstance(s0, (int, float)) or s0 <= 0:
        bad("damping", "s0", f"must be positive, got {s0!r}")
    q = cfg.get("damping", "q")
    if kind == "weak" and not (isinstance(q, (int, float)) and 0 < q < 1):
        bad("damping", "q", f"must lie in (0, 1), got {q!r}")

    dt = cfg.get("sim", "dt")
    if not isinstance(dt, (int, float)) or dt <= 0:
        bad("sim", "dt", f"must be positive, got {dt!r}")
    t_end = cfg.get("sim", "t_end")
    if not isinstance(t_end, (int, float)) or t_end <= 0:
        bad("sim", "t_end", f"must be positive, got {t_end!r}")
    ec = cfg.get("sim", "error_control")
    if ec not in ("on", "off"):
        bad("sim", "error_control", f"must be on|off, got {ec!r}")

    radii = cfg.get("analysis", "radii")
    if radii is not None:
        if not isinstance(radii, list):
            radii = [radii]
            cfg.analysis["radii"] = radii
        vals = [r for r in radii if isinstance(r, (int, float))]
        if (len(vals) != len(radii) or any(r <= 0 for r in vals)
                or any(b <= a for a, b in zip(vals, vals[1:]))):
            bad("analysis", "radii", f"must be positive and increasing, got {radii!r}")
    fits = cfg.get("analysis", "fits")
    if fits is not None:
        if not isinstance(fits, list):
            fits = [fits]
            cfg.analysis["fits"] = fits
        for f in fits:
            if f not in ("exponential", "polynomial"):
                bad("analysis", "fits", f"unknown fit {f!r}")
    certkind = cfg.get("analysis", "certificate")
    if certkind is not None and certkind not in ("exp", "semiglobal", "poly"):
        bad("analysis", "certificate", f"must be exp|semiglobal|poly, got {certkind!r}")

    return problems


def serialize(cfg):
    """Config back to text; parse(serialize(parse(text))) is stable."""
    lines = []
    for sect in SECTIONS:
        data = cfg.section(sect)
        if not data:
            continue
        lines.append(f"[{sect}]")
        for key in sorted(data):
            v = data[key]
            if isinstance(v, np.ndarray):
                body = "; ".join(", ".join(repr(float(x)) for x in row) for row in v)
            elif isinstance(v, list):
                body = ", ".join(str(x) for x in v)
            else:
                body = str(v)
            lines.append(f"{key} = {body}")
        lines.append("")
    return "\n".join(lines)
