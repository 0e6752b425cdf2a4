"""Truth-table full adders and adder libraries.

A full adder is modelled purely behaviourally: two 8-entry bit tables
(sum and carry-out), indexed by ``idx = 4*A + 2*B + Cin``.  Approximate
adders are data, not code -- they are loaded from a JSON library file and
never hard-coded in the engine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

EXACT_NAME = "exact"
EXACT_SUM_BITS = "01101001"
EXACT_COUT_BITS = "00010111"


class AdderFormatError(ValueError):
    """A library document (or one of its entries) is malformed."""


class UnknownAdderError(KeyError):
    """An adder name did not resolve in the library."""

    def __str__(self) -> str:
        return self.args[0] if self.args else ""


@dataclass(frozen=True)
class FullAdderSpec:
    """One full-adder behaviour: 8 sum bits and 8 carry bits, idx = 4A+2B+Cin."""

    name: str
    sum_bits: tuple[int, ...]
    cout_bits: tuple[int, ...]

    def __post_init__(self):
        if not self.name:
            raise ValueError("adder name must be non-empty")
        for field in ("sum_bits", "cout_bits"):
            bits = getattr(self, field)
            if len(bits) != 8 or any(b not in (0, 1) for b in bits):
                raise ValueError(f"{self.name}: {field} must be 8 bits of 0/1")

    @classmethod
    def from_strings(cls, name: str, sum_bits: str, cout_bits: str) -> "FullAdderSpec":
        return cls(name, _parse_bits(name, "sum_bits", sum_bits),
                   _parse_bits(name, "cout_bits", cout_bits))

    def sum_string(self) -> str:
        return "".join(str(b) for b in self.sum_bits)

    def cout_string(self) -> str:
        return "".join(str(b) for b in self.cout_bits)


def _parse_bits(name: str, field: str, text) -> tuple[int, ...]:
    if not isinstance(text, str):
        raise AdderFormatError(f"entry {name!r}: {field} must be a string")
    if len(text) != 8:
        raise AdderFormatError(
            f"entry {name!r}: {field} has length {len(text)}, expected 8")
    if any(ch not in "01" for ch in text):
        raise AdderFormatError(f"entry {name!r}: {field} contains non-binary characters")
    return tuple(int(ch) for ch in text)


@lru_cache(maxsize=1)
def exact_full_adder() -> FullAdderSpec:
    """Reference behaviour: sum = 3-input XOR, carry = 3-input majority."""
    sum_bits = []
    cout_bits = []
    for idx in range(8):
        a, b, cin = (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
        sum_bits.append(a ^ b ^ cin)
        cout_bits.append(1 if a + b + cin >= 2 else 0)
    return FullAdderSpec(EXACT_NAME, tuple(sum_bits), tuple(cout_bits))


def eval_adder(spec: FullAdderSpec, a: int, b: int, cin: int) -> tuple[int, int]:
    """Pure table lookup; inputs must be single bits."""
    if a not in (0, 1) or b not in (0, 1) or cin not in (0, 1):
        raise ValueError(f"adder inputs must be bits, got ({a}, {b}, {cin})")
    idx = 4 * a + 2 * b + cin
    return spec.sum_bits[idx], spec.cout_bits[idx]


@dataclass(frozen=True)
class AdderErrorProfile:
    """Rows of a spec's truth table that disagree with the exact adder."""

    name: str
    sum_error_rows: frozenset[int]
    cout_error_rows: frozenset[int]

    @property
    def row_error_count(self) -> int:
        return len(self.sum_error_rows) + len(self.cout_error_rows)


def error_profile(spec: FullAdderSpec) -> AdderErrorProfile:
    exact = exact_full_adder()
    sum_rows = frozenset(i for i in range(8) if spec.sum_bits[i] != exact.sum_bits[i])
    cout_rows = frozenset(i for i in range(8) if spec.cout_bits[i] != exact.cout_bits[i])
    return AdderErrorProfile(spec.name, sum_rows, cout_rows)


class AdderLibrary:
    """Ordered, name-unique collection of full-adder specs.

    Always contains an entry named "exact"; if the source document omits
    it, the canonical exact adder is appended.
    """

    def __init__(self, specs: Iterable[FullAdderSpec] = ()):
        self._entries: dict[str, FullAdderSpec] = {}
        for spec in specs:
            self.add(spec)
        if EXACT_NAME not in self._entries:
            self.add(exact_full_adder())

    def add(self, spec: FullAdderSpec) -> None:
        if spec.name in self._entries:
            raise AdderFormatError(f"duplicate adder name {spec.name!r}")
        if spec.name == EXACT_NAME and spec != exact_full_adder():
            raise AdderFormatError(
                f"entry {EXACT_NAME!r}: tables do not match the exact full adder "
                f"(expected sum_bits {EXACT_SUM_BITS!r}, cout_bits {EXACT_COUT_BITS!r})")
        self._entries[spec.name] = spec

    def get(self, name: str) -> FullAdderSpec:
        try:
            return self._entries[name]
        except KeyError:
            raise UnknownAdderError(
                f"unknown adder type {name!r}; library has {sorted(self._entries)}"
            ) from None

    def names(self) -> list[str]:
        return list(self._entries)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __iter__(self):
        return iter(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)


def load_library(document: str) -> AdderLibrary:
    """Parse a JSON adder-library document.

    The document is a top-level list of objects with fields ``name``,
    ``sum_bits`` and ``cout_bits`` (8-character '0'/'1' strings, position
    i = truth-table index i).
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise AdderFormatError(f"library document is not valid JSON: {exc}") from None
    if not isinstance(data, list):
        raise AdderFormatError("library document must be a top-level list of entries")

    specs = []
    for pos, entry in enumerate(data):
        if not isinstance(entry, dict):
            raise AdderFormatError(f"entry #{pos} is not an object")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise AdderFormatError(f"entry #{pos}: missing or empty name")
        for field in ("sum_bits", "cout_bits"):
            if field not in entry:
                raise AdderFormatError(f"entry {name!r}: missing field {field!r}")
        specs.append(FullAdderSpec(
            name,
            _parse_bits(name, "sum_bits", entry["sum_bits"]),
            _parse_bits(name, "cout_bits", entry["cout_bits"]),
        ))
    return AdderLibrary(specs)


def load_library_file(path) -> AdderLibrary:
    with open(path, encoding="utf-8") as fh:
        return load_library(fh.read())


def dump_library(library: AdderLibrary) -> str:
    """Serialize in canonical form: load_library(dump_library(lib)) round-trips."""
    entries = [
        {"name": s.name, "sum_bits": s.sum_string(), "cout_bits": s.cout_string()}
        for s in library
    ]
    return json.dumps(entries, indent=2) + "\n"
