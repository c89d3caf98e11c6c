"""Small shared helpers: stable seed derivation and canonical JSON."""

from __future__ import annotations

import hashlib
import json


def derive_seed(seed: int, label: str) -> int:
    """Stable 63-bit stream seed for (base seed, label), identical across
    processes and platforms (unlike ``hash()``)."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & (2**63 - 1)


def canonical_json(payload) -> str:
    """Deterministic JSON text: sorted keys, no insignificant whitespace."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
