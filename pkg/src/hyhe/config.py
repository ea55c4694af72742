"""Run configuration: defaults, file/env loading, validation.

Config files are flat ``key = value`` lines with ``#`` comments.  Environment
variables with the ``HYHE_`` prefix override file values (e.g. HYHE_N_BASIS).
"""

import os
from dataclasses import dataclass, fields, replace

DEFAULT_SWEEP = (20, 30, 40, 50)
ENV_PREFIX = "HYHE_"
OUTPUT_FORMATS = ("human", "json", "csv")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    n_basis: int = 50
    precision_digits: int = 50
    k_init: float = 2.0
    k_tol: float = 1e-12
    max_outer_iters: int = 60
    quadrature_target: float = 1e-14
    output: str = "human"

    def validate(self):
        if self.n_basis < 1:
            raise ConfigError(f"n_basis must be >= 1, got {self.n_basis}")
        if self.precision_digits < 30:
            raise ConfigError(
                f"precision_digits must be >= 30, got {self.precision_digits}")
        if not self.k_init > 0:
            raise ConfigError(f"k_init must be positive, got {self.k_init}")
        if not self.k_tol > 0:
            raise ConfigError(f"k_tol must be positive, got {self.k_tol}")
        if self.max_outer_iters < 1:
            raise ConfigError(
                f"max_outer_iters must be >= 1, got {self.max_outer_iters}")
        if not self.quadrature_target > 0:
            raise ConfigError(
                f"quadrature_target must be positive, got {self.quadrature_target}")
        if self.output not in OUTPUT_FORMATS:
            raise ConfigError(
                f"output must be one of {OUTPUT_FORMATS}, got {self.output!r}")
        return self

    def echo(self):
        return {f.name: getattr(self, f.name) for f in fields(RunConfig)}


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key, raw):
    ftype = _FIELD_TYPES[key]
    try:
        if ftype is int:
            return int(raw)
        if ftype is float:
            return float(raw)
        return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config key {key!r}: cannot parse {raw!r}") from exc


def parse_config_text(text):
    """Parse flat ``key = value`` lines into a dict (no validation here)."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def load_config(source=None, env=None):
    """Build a RunConfig from a mapping, config-file text, or path.

    Unknown keys are rejected by name.  ``HYHE_*`` environment variables
    override document values; explicit keyword layering beyond that is the
    CLI's job.
    """
    if source is None:
        doc = {}
    elif isinstance(source, dict):
        doc = dict(source)
    elif isinstance(source, (str, os.PathLike)) and os.path.exists(str(source)):
        with open(source) as fh:
            doc = parse_config_text(fh.read())
    elif isinstance(source, str):
        doc = parse_config_text(source)
    else:
        raise ConfigError(f"unsupported config source: {type(source).__name__}")

    env = os.environ if env is None else env
    for f in fields(RunConfig):
        env_key = ENV_PREFIX + f.name.upper()
        if env_key in env:
            doc[f.name] = env[env_key]

    unknown = set(doc) - set(_FIELD_TYPES)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")

    kwargs = {k: _coerce(k, v) for k, v in doc.items()}
    return RunConfig(**kwargs).validate()


def to_text(config):
    """Serialize to the flat key = value format (round-trips exactly)."""
    lines = [f"{f.name} = {getattr(config, f.name)}" for f in fields(RunConfig)]
    return "\n".join(lines) + "\n"


def with_overrides(config, **kwargs):
    """Replace fields (None values ignored) and re-validate."""
    updates = {k: v for k, v in kwargs.items() if v is not None}
    return replace(config, **updates).validate() if updates else config
