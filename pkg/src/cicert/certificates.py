"""Certificate files: canonical serialization, hashing, replay support.

A certificate is a JSON tree with canonically ordered keys.  Timings
and the replay hash itself are volatile: they are excluded from the
hash and from replay comparison.  Replaying re-executes the recorded
command with the recorded seed and budgets and demands a byte-identical
core payload, so any tampering with witnesses is detected.
"""

from __future__ import annotations

import copy
import hashlib
import json

SCHEMA = "cicert.certificate/1"
VOLATILE_KEYS = ("timings", "replay_hash")


class SchemaError(ValueError):
    """Unsupported or malformed certificate file."""


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def core_payload(payload: dict) -> dict:
    core = copy.deepcopy(payload)
    for key in VOLATILE_KEYS:
        core.pop(key, None)
    return core


def replay_hash(payload: dict) -> str:
    text = canonical_json(core_payload(payload))
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def finalize(payload: dict) -> dict:
    payload["schema"] = SCHEMA
    payload["replay_hash"] = replay_hash(payload)
    return payload


def dumps(payload: dict) -> str:
    return canonical_json(payload)


def write_certificate(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(payload))


def load_certificate(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not a certificate file: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("schema") != SCHEMA:
        raise SchemaError(f"unsupported schema {payload.get('schema')!r}")
    return payload
