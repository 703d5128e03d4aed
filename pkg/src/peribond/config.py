"""Run configuration: line-oriented `[section]` / `key = value` files.

The format is deliberately small: sections in brackets, one key per line,
`#` starts a comment, values are scalars or comma-separated lists. Every
key is declared in the schema below with a type, a default, and an optional
constraint; unknown sections or keys are rejected, duplicates are rejected
naming the line, and every constraint failure names section, key, and the
constraint itself. parse_config(print_config(cfg)) reproduces cfg exactly
(floats are serialized with 17 significant digits).
"""

from dataclasses import dataclass, field
import math

from .errors import ConfigError
from .kernels import BREAKER_MODES, KERNEL_FAMILIES, MICRO_FAMILIES

_SENTINEL = object()


@dataclass(frozen=True)
class Field:
    kind: str                # int | float | bool | str | float_list | bool_list | dt
    default: object
    choices: tuple = ()
    constraint: str = ""     # human-readable; shown verbatim in errors
    check: object = None     # predicate on the parsed value


def _positive(v):
    return v > 0.0


def _non_negative(v):
    return v >= 0.0


SCHEMA = {
    "domain": {
        "dim": Field("int", 1, constraint="must be 1, 2, or 3",
                     check=lambda v: v in (1, 2, 3)),
        "box": Field("float_list", (1.0,), constraint="entries must be positive",
                     check=lambda v: all(x > 0.0 for x in v)),
        "h": Field("float", 0.025, constraint="must be positive", check=_positive),
        "rho": Field("float", 1.0, constraint="must be positive", check=_positive),
        "periodic": Field("bool_list", (True,)),
    },
    "horizon": {
        "delta": Field("float", 0.1, constraint="must be positive", check=_positive),
        "partial_volume": Field("str", "linear", choices=("linear", "none")),
    },
    "kernel": {
        "family": Field("str", "pmb", choices=tuple(sorted(KERNEL_FAMILIES))),
        "c": Field("float", 1.0, constraint="must be positive", check=_positive),
        "u_star": Field("float", math.inf, constraint="must be positive",
                        check=_positive),
        "alpha": Field("float", 0.5),
        "c0": Field("float", 1.0, constraint="must be positive", check=_positive),
        "micro": Field("str", "cylindrical", choices=MICRO_FAMILIES),
        "exponent": Field("int", 3,
                          constraint="must be an odd integer greater than 1",
                          check=lambda v: v > 1 and v % 2 == 1),
        "kappa": Field("float", 1.0, constraint="must be positive", check=_positive),
        "p": Field("float", 2.0, constraint="must be at least 2",
                   check=lambda v: v >= 2.0),
        "g": Field("float", 1.0, constraint="must be positive", check=_positive),
        "vdw_a": Field("float", 0.0, constraint="must be non-negative",
                       check=_non_negative),
        "vdw_b": Field("float", 0.0, constraint="must be non-negative",
                       check=_non_negative),
    },
    "breaker": {
        "mode": Field("str", "none", choices=BREAKER_MODES),
        "s0": Field("float", math.inf, constraint="must be positive", check=_positive),
        "eps": Field("float", 0.0, constraint="must be non-negative",
                     check=_non_negative),
    },
    "load": {
        "preset": Field("str", "none",
                        choices=("none", "constant", "sinusoidal-in-x",
                                 "opposing-last-axis")),
        "amplitude": Field("float_list", ()),
        "wavelength": Field("float", 1.0, constraint="must be positive",
                            check=_positive),
        "center": Field("float", 0.5),
    },
    "time": {
        "dt": Field("dt", "auto", constraint="must be positive or 'auto'"),
        "steps": Field("int", 100, constraint="must be non-negative",
                       check=lambda v: v >= 0),
        "record_every": Field("int", 1, constraint="must be at least 1",
                              check=lambda v: v >= 1),
        "safety": Field("float", 0.5, constraint="must be in (0, 1]",
                        check=lambda v: 0.0 < v <= 1.0),
    },
    "memory": {
        "mode": Field("str", "infinite", choices=("infinite", "finite", "zero")),
        "s": Field("float", math.inf, constraint="must be positive", check=_positive),
        "coefficient": Field("float", 1.0, constraint="must be positive",
                             check=_positive),
        "fluid_kernel": Field("str", "linear", choices=("linear", "kernel")),
    },
    "output": {
        "directory": Field("str", "out"),
        "snapshot_every": Field("int", 0, constraint="must be non-negative",
                                check=lambda v: v >= 0),
    },
    "scenario": {
        "preset": Field("str", "none",
                        choices=("none", "bar1d-wave", "plate2d-precrack",
                                 "fluid-shear")),
        "amplitude": Field("float", 1e-3, constraint="must be positive",
                           check=_positive),
        "m": Field("int", 4, constraint="must be at least 2",
                   check=lambda v: v >= 2),
        "periods": Field("float", 1.0, constraint="must be positive",
                         check=_positive),
        "v0": Field("float", 0.1, constraint="must be positive", check=_positive),
    },
}

# keys of [kernel] that each family accepts, besides "family"
FAMILY_KEYS = {
    "anti-plane-shear": ("c", "u_star"),
    "quadratic": ("alpha",),
    "pmb": ("c0", "micro"),
    "rod": ("c0", "micro"),
    "convolution": ("c", "exponent"),
    "nonlinear-p": ("kappa", "p", "alpha"),
    "nano-membrane": ("c", "g"),
    "nano-fiber": ("c", "g", "vdw_a", "vdw_b"),
}

SECTION_ORDER = tuple(SCHEMA)


@dataclass
class RunConfig:
    """Validated run configuration: a full table of every schema key."""

    sections: dict = field(default_factory=dict)

    def get(self, section, key):
        return self.sections[section][key]

    def set(self, section, key, value):
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError(f"unknown key [{section}] {key}")
        self.sections[section][key] = value

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.sections == other.sections


def _parse_scalar(section, key, spec, raw, lineno):
    where = f"[{section}] {key}"
    raw = raw.strip()

    def fail(reason):
        at = f" (line {lineno})" if lineno else ""
        return ConfigError(f"{where}: {reason}{at}")

    if spec.kind == "int":
        try:
            value = int(raw)
        except ValueError:
            raise fail(f"expected an integer, got {raw!r}") from None
    elif spec.kind in ("float", "dt"):
        if spec.kind == "dt" and raw == "auto":
            return "auto"
        try:
            value = float(raw)
        except ValueError:
            raise fail(f"expected a number, got {raw!r}") from None
        if spec.kind == "dt" and not value > 0.0:
            raise fail(f"{spec.constraint}, got {raw}")
    elif spec.kind == "bool":
        if raw not in ("true", "false"):
            raise fail(f"expected true or false, got {raw!r}")
        value = raw == "true"
    elif spec.kind == "str":
        value = raw
    elif spec.kind == "float_list":
        parts = [p.strip() for p in raw.split(",")] if raw else []
        try:
            value = tuple(float(p) for p in parts if p != "")
        except ValueError:
            raise fail(f"expected comma-separated numbers, got {raw!r}") from None
    elif spec.kind == "bool_list":
        parts = [p.strip() for p in raw.split(",")] if raw else []
        for p in parts:
            if p not in ("true", "false"):
                raise fail(f"expected comma-separated true/false, got {raw!r}")
        value = tuple(p == "true" for p in parts)
    else:  # pragma: no cover - schema is static
        raise fail(f"unhandled kind {spec.kind}")

    if spec.choices and value not in spec.choices:
        raise fail(f"must be one of {', '.join(spec.choices)}; got {value!r}")
    if spec.check is not None and not spec.check(value):
        raise fail(f"{spec.constraint}, got {raw}")
    return value


def _nonlinear_alpha_ok(cfg):
    """alpha doubles as the quadratic coefficient; the open-interval bound
    applies only where the power-law family consumes it."""
    return 0.0 < cfg.get("kernel", "alpha") < 1.0


def validate_config(cfg: RunConfig) -> RunConfig:
    """Cross-key consistency checks after per-key parsing."""
    dim = cfg.get("domain", "dim")
    for key in ("box", "periodic"):
        seq = cfg.get("domain", key)
        if len(seq) != dim:
            raise ConfigError(
                f"[domain] {key}: needs exactly {dim} entries for dim = {dim}, "
                f"got {len(seq)}"
            )
    family = cfg.get("kernel", "family")
    if family == "nonlinear-p" and not _nonlinear_alpha_ok(cfg):
        raise ConfigError(
            f"[kernel] alpha: alpha must lie in the open interval (0, 1) for "
            f"the nonlinear-p family, got {cfg.get('kernel', 'alpha')}"
        )
    if cfg.get("breaker", "mode") == "critical-stretch" and not (
        cfg.get("breaker", "s0") > 0.0
    ):
        raise ConfigError("[breaker] s0: must be positive, got "
                          f"{cfg.get('breaker', 's0')}")
    if cfg.get("breaker", "mode") == "theta-eps" and not (
        cfg.get("breaker", "eps") > 0.0
    ):
        raise ConfigError(
            "[breaker] eps: must be positive for the theta-eps breaker, got "
            f"{cfg.get('breaker', 'eps')}"
        )
    amp = cfg.get("load", "amplitude")
    if cfg.get("load", "preset") != "none" and len(amp) != dim:
        raise ConfigError(
            f"[load] amplitude: needs exactly {dim} entries for dim = {dim}, "
            f"got {len(amp)}"
        )
    if cfg.get("memory", "mode") == "finite":
        s = cfg.get("memory", "s")
        if not (s > 0.0 and math.isfinite(s)):
            raise ConfigError(
                f"[memory] s: must be positive and finite for finite memory, got {s}"
            )
    return cfg


def default_config() -> RunConfig:
    sections = {
        section: {key: spec.default for key, spec in keys.items()}
        for section, keys in SCHEMA.items()
    }
    return RunConfig(sections)


def parse_config(text: str, presets: dict = None, forced_preset: str = None) -> RunConfig:
    """Parse, overlay the scenario preset (explicit keys win), validate.

    presets maps preset name -> {section: {key: value}} partial tables; the
    scenario builders register theirs so a one-line config selects a full
    experiment while any explicitly written key overrides the preset value.
    forced_preset is the command-line preset flag; it conflicts with an
    explicit `[scenario] preset` line rather than silently losing to it.
    """
    explicit = {}   # (section, key) -> (value, lineno)
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("["):
            if not body.endswith("]"):
                raise ConfigError(f"malformed section header {line.strip()!r} "
                                  f"(line {lineno})")
            name = body[1:-1].strip()
            if name not in SCHEMA:
                raise ConfigError(f"unknown section [{name}] (line {lineno})")
            section = name
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r} (line {lineno})")
        if section is None:
            raise ConfigError(f"key outside any section (line {lineno})")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in SCHEMA[section]:
            raise ConfigError(f"unknown key [{section}] {key} (line {lineno})")
        if (section, key) in explicit:
            first = explicit[(section, key)][1]
            raise ConfigError(
                f"duplicate key [{section}] {key} (line {lineno}, first set on "
                f"line {first})"
            )
        value = _parse_scalar(section, key, SCHEMA[section][key], raw, lineno)
        explicit[(section, key)] = (value, lineno)

    if forced_preset is not None:
        if ("scenario", "preset") in explicit:
            line = explicit[("scenario", "preset")][1]
            raise ConfigError(
                f"[scenario] preset: set both on the command line "
                f"({forced_preset!r}) and in the config (line {line})"
            )
        spec = SCHEMA["scenario"]["preset"]
        explicit[("scenario", "preset")] = (
            _parse_scalar("scenario", "preset", spec, forced_preset, 0), 0,
        )

    cfg = default_config()
    preset_name = explicit.get(("scenario", "preset"), (None, 0))[0]
    if presets is None:
        from .scenarios import PRESET_CONFIGS

        presets = PRESET_CONFIGS
    if preset_name and preset_name != "none":
        for psection, pkeys in presets[preset_name].items():
            for pkey, pvalue in pkeys.items():
                cfg.sections[psection][pkey] = pvalue
    for (esection, ekey), (value, _) in explicit.items():
        cfg.sections[esection][ekey] = value

    family = cfg.get("kernel", "family")
    allowed = set(FAMILY_KEYS[family]) | {"family"}
    for (esection, ekey), (_, lineno) in explicit.items():
        if esection == "kernel" and ekey not in allowed:
            raise ConfigError(
                f"[kernel] {ekey}: not accepted by family {family!r} "
                f"(line {lineno}); allowed keys: "
                f"{', '.join(FAMILY_KEYS[family])}"
            )
    return validate_config(cfg)


def _format_value(spec, value):
    if spec.kind == "int":
        return str(int(value))
    if spec.kind == "float" or (spec.kind == "dt" and value != "auto"):
        return "%.17g" % float(value)
    if spec.kind == "dt":
        return "auto"
    if spec.kind == "bool":
        return "true" if value else "false"
    if spec.kind == "float_list":
        return ", ".join("%.17g" % float(v) for v in value)
    if spec.kind == "bool_list":
        return ", ".join("true" if v else "false" for v in value)
    return str(value)


def print_config(cfg: RunConfig) -> str:
    """Canonical text form; parse_config(print_config(cfg)) == cfg.

    The [kernel] section lists only the active family's keys (the others are
    rejected on input, so a valid config always holds them at defaults).
    """
    family = cfg.get("kernel", "family")
    kernel_keys = ("family",) + FAMILY_KEYS[family]
    lines = []
    for section in SECTION_ORDER:
        lines.append(f"[{section}]")
        for key, spec in SCHEMA[section].items():
            if section == "kernel" and key not in kernel_keys:
                continue
            lines.append(f"{key} = {_format_value(spec, cfg.get(section, key))}")
        lines.append("")
    return "\n".join(lines)
