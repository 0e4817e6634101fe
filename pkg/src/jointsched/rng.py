"""Deterministic, labeled RNG sub-streams.

All randomness in the package flows through Philox counter-based generators
keyed by a 64-bit master seed plus a tuple of string/int labels. The label
hash is BLAKE2b, so seeds are portable across platforms and processes and
sub-streams never collide by construction of the label encoding.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["substream_seed", "generator"]


def substream_seed(master_seed: int, *labels) -> int:
    """Derive a 64-bit seed for the sub-stream named by ``labels``.

    Labels are encoded unambiguously (length-prefixed UTF-8 for strings,
    fixed-width big-endian for ints), so distinct label tuples always map
    to distinct hash inputs. Integer seeds and labels are reduced to the
    64-bit space before hashing.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update((int(master_seed) % (1 << 64)).to_bytes(8, "big"))
    for label in labels:
        if isinstance(label, str):
            raw = label.encode("utf-8")
            h.update(b"s" + len(raw).to_bytes(4, "big") + raw)
        elif isinstance(label, (int, np.integer)):
            h.update(b"i" + (int(label) % (1 << 64)).to_bytes(8, "big"))
        else:
            raise TypeError(f"unsupported label type: {type(label)!r}")
    return int.from_bytes(h.digest(), "big")


def generator(master_seed: int, *labels) -> np.random.Generator:
    """Philox generator for the sub-stream named by ``labels``."""
    return np.random.Generator(np.random.Philox(substream_seed(master_seed, *labels)))
