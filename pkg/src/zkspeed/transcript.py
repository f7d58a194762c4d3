"""SHA3-256 Fiat-Shamir transcript.

Every absorb appends ``len(label) ‖ label ‖ len(data) ‖ data`` (lengths as
4-byte big-endian) to a running hash.  A challenge hashes the state so far
plus the framed label, reduces the 256-bit big-endian digest mod q, and
then absorbs the label and digest so the next challenge differs.
"""

from __future__ import annotations

import hashlib
from typing import Iterable

from .fp import FieldConfig, FieldElement


def _frame(b: bytes) -> bytes:
    return len(b).to_bytes(4, "big") + b


class Transcript:
    def __init__(self, field: FieldConfig, domain: bytes = b""):
        self.field = field
        self._h = hashlib.sha3_256()
        self.counter = 0
        self.absorbed = 0
        if domain:
            self.absorb(b"domain", domain)

    def absorb(self, label: bytes | str, data: bytes) -> None:
        if isinstance(label, str):
            label = label.encode()
        self._h.update(_frame(label) + _frame(bytes(data)))
        self.absorbed += 1

    def absorb_scalars(self, label: bytes | str, xs: Iterable[FieldElement]) -> None:
        self.absorb(label, b"".join(x.to_bytes() for x in xs))

    def absorb_scalar(self, label: bytes | str, x: FieldElement) -> None:
        self.absorb(label, x.to_bytes())

    def challenge_bytes(self, label: bytes | str) -> bytes:
        if isinstance(label, str):
            label = label.encode()
        h = self._h.copy()
        h.update(_frame(label))
        digest = h.digest()
        self._h.update(_frame(label) + _frame(digest))
        self.counter += 1
        return digest

    def challenge(self, label: bytes | str) -> FieldElement:
        return self.field(int.from_bytes(self.challenge_bytes(label), "big"))

    def challenges(self, label: bytes | str, n: int) -> list[FieldElement]:
        base = label.encode() if isinstance(label, str) else label
        return [self.challenge(base + b"/" + str(i).encode()) for i in range(n)]

    def digest(self) -> bytes:
        return self._h.copy().digest()

    def fork(self) -> "Transcript":
        t = Transcript.__new__(Transcript)
        t.field = self.field
        t._h = self._h.copy()
        t.counter = self.counter
        t.absorbed = self.absorbed
        return t
