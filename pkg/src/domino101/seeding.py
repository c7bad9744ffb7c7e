"""Deterministic seed derivation.

All randomness in the package flows from ``random.Random`` (Mersenne
Twister) instances.  Sub-streams (per match, per seat, per redeal attempt)
are derived by hashing the root seed together with string labels, so
parallel workers and incremental replays see identical streams.
"""

from __future__ import annotations

import hashlib
import random

RNG_NAME = "python-random-mt19937"


def derive_seed(root: int, *labels: object) -> int:
    """A stable 64-bit seed for the sub-stream named by ``labels``."""
    text = ":".join([str(root), *map(str, labels)])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derived_rng(root: int, *labels: object) -> random.Random:
    return random.Random(derive_seed(root, *labels))
