"""Line-oriented run configuration: dotted keys, `key = value` pairs.

The file format is deliberately tiny: one `section.key = value` per
line, `#` comments, blank lines ignored.  Values round-trip through
load/dump unchanged (ints stay ints, floats keep full precision).
"""

from __future__ import annotations

from .errors import DomainError

__all__ = ["loads", "load", "dumps", "dump", "merge"]


def _parse_value(raw: str):
    s = raw.strip()
    low = s.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", ""):
        return None
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        pass
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "'\"":
        return s[1:-1]
    return s


def _format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)  # shortest round-trip form
    return str(value)


def loads(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise DomainError(f"config line {lineno}: expected key = value")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if not key:
            raise DomainError(f"config line {lineno}: empty key")
        out[key] = _parse_value(raw)
    return out


def load(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(cfg: dict) -> str:
    lines = [f"{k} = {_format_value(v)}" for k, v in sorted(cfg.items())]
    return "\n".join(lines) + "\n"


def dump(cfg: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(cfg))


def merge(base: dict, override: dict) -> dict:
    """Later keys win; None overrides are ignored (flag not given)."""
    out = dict(base)
    for k, v in override.items():
        if v is not None:
            out[k] = v
    return out
