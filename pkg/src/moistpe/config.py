"""Plain-text run configuration with dotted section keys.

Format: one `section.key = value` per line; blank lines and lines starting
with `#` are ignored.  Unknown or duplicated keys are hard errors (silent
typos corrupt experiments).  Omitted keys take the documented defaults, and
serialization always writes every key, so parse -> serialize -> parse is the
identity.

Sections and keys:

  grid.nx, grid.ny, grid.np          even integers >= 8
  domain.p0, domain.p1               pressure bounds, 0 < p0 < p1
  physics.R, physics.cp, physics.g, physics.f_cor
  physics.mu_v,  physics.nu_v       }
  physics.mu_theta, physics.nu_theta }  positive viscosities
  physics.mu_q,  physics.nu_q       }
  physics.theta_bar, physics.theta_h   profile tokens: constant:a |
                                       linear:a,b | proportional:a
  physics.phi_s                      zero | file:<path to .npy, shape nx x ny>
  time.dt, time.t_end, time.t0       floats (t0 is the resume time)
  time.scheme                        imex_cnab2 | erk4_fully_explicit
  time.cfl_target                    in (0, 1]
  time.adapt                         true | false
  forcing.kind                       zero | manufactured:<case> | file:<path>
  initial.kind                       rest | random_smooth:<seed[,amplitude[,band]]>
                                     | file:<path>
  initial.symmetry                   none | paper_parity
  output.norms_path                  none | <path> (NDJSON; a .csv mirror is
                                     written next to it)
  output.norms_every                 record every k-th step (k >= 1)
  output.checkpoint_path             none | <path>
  output.checkpoint_every            0 = final state only; k > 0 also every
                                     k-th recorded sample (file is rolling)

The pressure bounds live in the domain section only; the physics parameter
set reuses them, so there is exactly one place to mistype them.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields, replace

from .errors import ConfigError
from .grid import Grid
from .params import PhysParams, Profile
from .stepper import SCHEMES, StepConfig

SYMMETRY_TOKENS = ("none", "paper_parity")


@dataclass(frozen=True)
class RunConfig:
    nx: int = 32
    ny: int = 32
    np: int = 32
    p0: float = 0.2
    p1: float = 1.0
    R: float = 1.0
    cp: float = 3.5
    g: float = 1.0
    f_cor: float = 1.0
    mu_v: float = 1e-2
    nu_v: float = 1e-2
    mu_theta: float = 1e-2
    nu_theta: float = 1e-2
    mu_q: float = 1e-2
    nu_q: float = 1e-2
    theta_bar: str = "constant:1.0"
    theta_h: str = "constant:0.0"
    phi_s: str = "zero"
    dt: float = 1e-3
    t_end: float = 1.0
    t0: float = 0.0
    scheme: str = "imex_cnab2"
    cfl_target: float = 0.5
    adapt: bool = False
    forcing_kind: str = "zero"
    initial_kind: str = "rest"
    initial_symmetry: str = "none"
    norms_path: str = "none"
    norms_every: int = 1
    checkpoint_path: str = "none"
    checkpoint_every: int = 0

    def with_(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


# dotted key -> (attribute, parse, format)
KEYMAP = {
    "grid.nx": ("nx", int, str),
    "grid.ny": ("ny", int, str),
    "grid.np": ("np", int, str),
    "domain.p0": ("p0", float, repr),
    "domain.p1": ("p1", float, repr),
    "physics.R": ("R", float, repr),
    "physics.cp": ("cp", float, repr),
    "physics.g": ("g", float, repr),
    "physics.f_cor": ("f_cor", float, repr),
    "physics.mu_v": ("mu_v", float, repr),
    "physics.nu_v": ("nu_v", float, repr),
    "physics.mu_theta": ("mu_theta", float, repr),
    "physics.nu_theta": ("nu_theta", float, repr),
    "physics.mu_q": ("mu_q", float, repr),
    "physics.nu_q": ("nu_q", float, repr),
    "physics.theta_bar": ("theta_bar", str, str),
    "physics.theta_h": ("theta_h", str, str),
    "physics.phi_s": ("phi_s", str, str),
    "time.dt": ("dt", float, repr),
    "time.t_end": ("t_end", float, repr),
    "time.t0": ("t0", float, repr),
    "time.scheme": ("scheme", str, str),
    "time.cfl_target": ("cfl_target", float, repr),
    "time.adapt": ("adapt", _parse_bool, _fmt_bool),
    "forcing.kind": ("forcing_kind", str, str),
    "initial.kind": ("initial_kind", str, str),
    "initial.symmetry": ("initial_symmetry", str, str),
    "output.norms_path": ("norms_path", str, str),
    "output.norms_every": ("norms_every", int, str),
    "output.checkpoint_path": ("checkpoint_path", str, str),
    "output.checkpoint_every": ("checkpoint_every", int, str),
}

_ATTR_TO_KEY = {attr: key for key, (attr, _, _) in KEYMAP.items()}


def parse(text: str) -> RunConfig:
    """Parse config text; unknown or repeated keys raise ConfigError."""
    values: dict[str, object] = {}
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KEYMAP:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate config key {key!r}")
        seen.add(key)
        attr, parse_fn, _ = KEYMAP[key]
        try:
            values[attr] = parse_fn(value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    cfg = RunConfig(**values)
    validate(cfg)
    return cfg


def serialize(cfg: RunConfig) -> str:
    """Canonical text form writing every key (sections in declaration order)."""
    lines = []
    section = None
    for key, (attr, _, fmt) in KEYMAP.items():
        sec = key.split(".")[0]
        if sec != section:
            if section is not None:
                lines.append("")
            section = sec
        lines.append(f"{key} = {fmt(getattr(cfg, attr))}")
    return "\n".join(lines) + "\n"


def load(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc


def save(path: str, cfg: RunConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(cfg))


# --- validation and materialization ----------------------------------------


def _key_error(attr: str, message: str) -> ConfigError:
    return ConfigError(f"{_ATTR_TO_KEY[attr]}: {message}")


def validate(cfg: RunConfig) -> None:
    for attr in ("nx", "ny", "np"):
        n = getattr(cfg, attr)
        if n < 8 or n % 2 != 0:
            raise _key_error(attr, f"mode count must be even and >= 8, got {n}")
    if not (0.0 < cfg.p0 < cfg.p1):
        raise _key_error("p0", f"pressure bounds need 0 < p0 < p1, got p0={cfg.p0}, p1={cfg.p1}")
    for attr in ("R", "cp", "g"):
        if getattr(cfg, attr) <= 0.0:
            raise _key_error(attr, "must be positive")
    for attr in ("mu_v", "nu_v", "mu_theta", "nu_theta", "mu_q", "nu_q"):
        if getattr(cfg, attr) <= 0.0:
            raise _key_error(attr, "viscosity must be positive")
    for attr in ("theta_bar", "theta_h"):
        try:
            Profile.parse(getattr(cfg, attr))
        except ConfigError as exc:
            raise _key_error(attr, str(exc)) from exc
    if cfg.phi_s != "zero" and not cfg.phi_s.startswith("file:"):
        raise _key_error("phi_s", f"expected 'zero' or 'file:<path>', got {cfg.phi_s!r}")
    if cfg.dt <= 0.0:
        raise _key_error("dt", f"must be positive, got {cfg.dt}")
    if cfg.t_end < cfg.t0:
        raise _key_error("t_end", f"must be >= time.t0, got t_end={cfg.t_end}, t0={cfg.t0}")
    if cfg.scheme not in SCHEMES:
        raise _key_error("scheme", f"unknown scheme {cfg.scheme!r}; choose from {SCHEMES}")
    if not (0.0 < cfg.cfl_target <= 1.0):
        raise _key_error("cfl_target", f"must lie in (0, 1], got {cfg.cfl_target}")
    parse_forcing_kind(cfg.forcing_kind)
    parse_initial_kind(cfg.initial_kind)
    if cfg.initial_symmetry not in SYMMETRY_TOKENS:
        raise _key_error("initial_symmetry",
                         f"expected one of {SYMMETRY_TOKENS}, got {cfg.initial_symmetry!r}")
    if cfg.norms_every < 1:
        raise _key_error("norms_every", f"must be >= 1, got {cfg.norms_every}")
    if cfg.checkpoint_every < 0:
        raise _key_error("checkpoint_every", f"must be >= 0, got {cfg.checkpoint_every}")


def parse_forcing_kind(token: str) -> tuple[str, str]:
    """-> ('zero'|'manufactured'|'file', argument)"""
    if token == "zero":
        return ("zero", "")
    head, sep, rest = token.partition(":")
    if head == "manufactured" and sep and rest:
        return ("manufactured", rest)
    if head == "file" and sep and rest:
        return ("file", rest)
    raise ConfigError(
        f"forcing.kind: expected 'zero', 'manufactured:<case>' or 'file:<path>', got {token!r}")


def parse_initial_kind(token: str) -> tuple[str, dict]:
    """-> ('rest'|'random_smooth'|'file', arguments)"""
    if token == "rest":
        return ("rest", {})
    head, sep, rest = token.partition(":")
    if head == "file" and sep and rest:
        return ("file", {"path": rest})
    if head == "random_smooth" and sep and rest:
        args = {"seed": None, "amplitude": 1.0, "band": None}
        order = ("seed", "amplitude", "band")
        try:
            for i, part in enumerate(p.strip() for p in rest.split(",")):
                if "=" in part:
                    name, _, val = part.partition("=")
                    name = name.strip()
                    if name not in args:
                        raise ValueError(f"unknown argument {name!r}")
                else:
                    if i >= len(order):
                        raise ValueError("too many positional arguments")
                    name, val = order[i], part
                if name == "amplitude":
                    args[name] = float(val)
                else:
                    args[name] = int(val)
        except ValueError as exc:
            raise ConfigError(f"initial.kind: bad random_smooth arguments {rest!r}: {exc}") from exc
        if args["seed"] is None:
            raise ConfigError("initial.kind: random_smooth needs a seed")
        if args["amplitude"] <= 0.0:
            raise ConfigError("initial.kind: random_smooth amplitude must be positive")
        return ("random_smooth", args)
    raise ConfigError(
        "initial.kind: expected 'rest', 'random_smooth:<seed[,amplitude[,band]]>' "
        f"or 'file:<path>', got {token!r}")


def build_grid(cfg: RunConfig) -> Grid:
    return Grid(cfg.nx, cfg.ny, cfg.np, cfg.p0, cfg.p1)


def build_params(cfg: RunConfig, phi_s=None) -> PhysParams:
    return PhysParams(
        R=cfg.R, cp=cfg.cp, g=cfg.g, f_cor=cfg.f_cor,
        p0=cfg.p0, p1=cfg.p1,
        mu_v=cfg.mu_v, nu_v=cfg.nu_v,
        mu_theta=cfg.mu_theta, nu_theta=cfg.nu_theta,
        mu_q=cfg.mu_q, nu_q=cfg.nu_q,
        theta_bar=Profile.parse(cfg.theta_bar),
        theta_h=Profile.parse(cfg.theta_h),
        phi_s=phi_s,
    )


def build_step_config(cfg: RunConfig) -> StepConfig:
    return StepConfig(dt=cfg.dt, t_end=cfg.t_end, scheme=cfg.scheme,
                      cfl_target=cfg.cfl_target, adapt=cfg.adapt)
