import hashlib
import json
from typing import Any

import yaml

from pyrunshaper.core.errors import ConfigurationError


SIGNIFICANT_DIGITS = 9


def format_decimal(value: float) -> str:
    """Serialize a number as decimal text with 9 significant digits."""
    return f"{float(value):.{SIGNIFICANT_DIGITS}g}"


def config_hash(data: Any) -> str:
    """Short, stable hash of a JSON-serializable configuration."""
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def parse_value(raw: str) -> Any:
    """
    Parse the right-hand side of a ``key=value`` line.

    Scalars and ``[a, b]`` lists are read as YAML; a bare comma-separated
    list (``0,1,2``) becomes a list of parsed scalars.
    """
    raw = raw.strip()
    if "," in raw and not raw.startswith(("[", "{", "'", '"')):
        return [parse_value(part) for part in raw.split(",") if part.strip()]
    try:
        value = yaml.safe_load(raw) if raw else None
    except yaml.YAMLError:
        return raw
    # YAML 1.1 reads exponent-only floats such as 1e-4 as strings
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    return value


def parse_key_value(text: str, source: str = "<text>") -> dict[str, Any]:
    """
    Parse ``key=value`` lines with dotted keys into a nested dictionary.

    Blank lines and lines starting with ``#`` are ignored.

    Args:
        text: File contents
        source: Name used in error messages

    Returns:
        Nested dictionary (``a.b=1`` becomes ``{"a": {"b": 1}}``)

    Raises:
        ConfigurationError: On malformed lines or conflicting keys
    """
    result: dict[str, Any] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigurationError(
                f"{source}:{line_no}: expected key=value, got {stripped!r}")
        key, value = stripped.split("=", 1)
        key = key.strip()
        if not key or any(not part for part in key.split(".")):
            raise ConfigurationError(f"{source}:{line_no}: empty key in {stripped!r}")
        set_dotted(result, key, parse_value(value), where=f"{source}:{line_no}")
    return result


def set_dotted(target: dict[str, Any], key: str, value: Any,
               where: str = "") -> None:
    """Assign ``value`` at a dotted path, creating nested dictionaries."""
    parts = key.split(".")
    node = target
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigurationError(
                f"{where}: key {key!r} conflicts with scalar {part!r}")
        node = child
    if isinstance(node.get(parts[-1]), dict):
        raise ConfigurationError(
            f"{where}: key {key!r} conflicts with a nested section")
    node[parts[-1]] = value


def parse_seed_list(raw: str) -> list[int]:
    """Parse ``"1,2,3"`` into ``[1, 2, 3]``."""
    try:
        seeds = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ConfigurationError(f"Seeds must be comma-separated integers, got {raw!r}")
    if not seeds:
        raise ConfigurationError("At least one seed is required")
    return seeds
