"""JSON Schema validation for nonlinearity descriptions and run configurations.

Schemas live in `core/schemas/`. When `jsonschema` is not importable the
caller-supplied lightweight check runs instead, so a bare environment
still rejects malformed input with a readable message.
"""
from typing import Any, Callable, Dict, Optional
import json
import logging
import os

from .errors import ConfigError

logger = logging.getLogger(__name__)

SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "schemas")

try:
    import jsonschema
except Exception:
    jsonschema = None  # type: ignore[assignment]


_SCHEMAS: Dict[str, Dict[str, Any]] = {}


def load_schema(name: str) -> Dict[str, Any]:
    if name not in _SCHEMAS:
        with open(os.path.join(SCHEMA_DIR, name), "r", encoding="utf-8") as f:
            _SCHEMAS[name] = json.load(f)
    return _SCHEMAS[name]


def _error_field(err: Any) -> str:
    path = [str(p) for p in getattr(err, "absolute_path", [])]
    if path:
        return ".".join(path)
    # "required" errors report the missing property in the message only
    validator_value = getattr(err, "validator_value", None)
    if getattr(err, "validator", None) == "required" and isinstance(validator_value, list):
        instance = getattr(err, "instance", {}) or {}
        missing = [v for v in validator_value if v not in instance]
        if missing:
            return str(missing[0])
    return ""


def validate_document(
    doc: Any,
    schema_name: str,
    fallback: Optional[Callable[[Any], Optional[str]]] = None,
) -> None:
    """Validate `doc` against a bundled schema.

    Args:
        doc: Parsed JSON document.
        schema_name: File name under `core/schemas/`.
        fallback: Check used without `jsonschema`; returns the offending
            field name or None when the document is acceptable.

    Raises:
        ConfigError: naming the offending field.
    """
    if jsonschema is not None:
        try:
            jsonschema.validate(instance=doc, schema=load_schema(schema_name))
        except jsonschema.ValidationError as e:
            field = _error_field(e)
            raise ConfigError(f"{schema_name}: {e.message}", field=field)
        return
    if fallback is not None:
        field = fallback(doc)
        if field is not None:
            raise ConfigError(f"{schema_name}: invalid or missing field '{field}'", field=field)
