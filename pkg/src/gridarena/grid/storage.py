"""Content-addressed blob store modelling a grid storage element."""

from __future__ import annotations

import hashlib


def digest_of(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


class StorageElement:
    """Immutable blobs keyed by their own digest.

    put() returns the reference; get() verifies content against the key so
    corruption (or a faulty transfer) is always detected at read time.
    """

    def __init__(self, name: str = "se"):
        self.name = name
        self.blobs: dict[str, bytes] = {}

    def put(self, data: bytes) -> str:
        ref = digest_of(data)
        self.blobs.setdefault(ref, data)
        return ref

    def has(self, ref: str) -> bool:
        return ref in self.blobs

    def get(self, ref: str) -> bytes:
        try:
            data = self.blobs[ref]
        except KeyError:
            raise KeyError(f"{self.name}: no blob {ref}") from None
        if digest_of(data) != ref:
            raise IOError(f"{self.name}: digest mismatch for {ref}")
        return data

    def size(self, ref: str) -> int:
        return len(self.get(ref))

    def copy_to(self, other: "StorageElement", ref: str) -> None:
        """Transfer one blob, re-verifying its digest on the way."""
        other.blobs.setdefault(ref, self.get(ref))

    def __len__(self) -> int:
        return len(self.blobs)
