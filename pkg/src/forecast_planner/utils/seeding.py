"""Deterministic sub-seed derivation for experiments."""

import hashlib
import json
from typing import Any


def derive_seed(*parts: Any) -> int:
    """Mix JSON-encodable coordinates into a 63-bit seed.

    The same coordinates always give the same seed, independent of
    platform, process and worker count.

    Args:
        *parts: Seed coordinates (master seed, cell values, indices)

    Returns:
        Non-negative integer usable with numpy.random.default_rng
    """
    digest = hashlib.sha256(
        json.dumps(list(parts), sort_keys=True, default=str).encode()
    ).digest()
    return int.from_bytes(digest[:8], "big") >> 1
