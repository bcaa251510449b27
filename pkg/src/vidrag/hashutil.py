"""Fixed 64-bit hashing used for feature buckets and fixture keys.

blake2b with an 8-byte digest and a fixed key gives the same value on every
platform and run, which keeps golden vectors and scripted-fixture keys stable.
"""

from __future__ import annotations

import hashlib

_KEY = b"vidrag-hash-v1"


def hash64(data: bytes) -> int:
    digest = hashlib.blake2b(data, digest_size=8, key=_KEY).digest()
    return int.from_bytes(digest, "little")


def hash64_text(text: str) -> int:
    return hash64(text.encode("utf-8"))


def prompt_key(system_prompt: str, user_prompt: str) -> str:
    """16-hex-char key for a (system, user) prompt pair."""
    data = system_prompt.encode("utf-8") + b"\x00" + user_prompt.encode("utf-8")
    return format(hash64(data), "016x")
