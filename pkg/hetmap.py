"""String-keyed heterogeneous value map used for configuration and metadata.

The variant set is closed: every stored value reports exactly one of the
variants below. Retrieval at the wrong variant raises VariantMismatch, except
that integers widen to reals (and integer lists to real lists).
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterator

from errors import KeyMissing, VariantMismatch


class Variant(str, Enum):
    INT = "int"
    REAL = "real"
    BOOL = "bool"
    TEXT = "text"
    REALS = "list-real"
    INTS = "list-int"
    TEXTS = "list-text"
    PAIRS = "pair-list"
    HANDLE = "handle"


_LIST_VARIANTS = (Variant.REALS, Variant.INTS, Variant.TEXTS, Variant.PAIRS)


def _is_int(v):
    return isinstance(v, numbers.Integral) and not isinstance(v, bool)


def _is_real(v):
    return isinstance(v, numbers.Real) and not isinstance(v, (bool, numbers.Integral))


def _is_pair(v):
    return isinstance(v, (tuple, list)) and len(v) == 2 and all(isinstance(s, str) for s in v)


def variant_of(value) -> Variant:
    if isinstance(value, HetValue):
        return value.variant
    if isinstance(value, bool):
        return Variant.BOOL
    if _is_int(value):
        return Variant.INT
    if _is_real(value):
        return Variant.REAL
    if isinstance(value, str):
        return Variant.TEXT
    if isinstance(value, (list, tuple)):
        items = list(value)
        if not items:
            return Variant.REALS
        if all(_is_int(v) for v in items):
            return Variant.INTS
        if all(_is_int(v) or _is_real(v) for v in items):
            return Variant.REALS
        if all(isinstance(v, str) for v in items):
            return Variant.TEXTS
        if all(_is_pair(v) for v in items):
            return Variant.PAIRS
    return Variant.HANDLE


def _normalize(value, variant):
    if variant is Variant.INT:
        return int(value)
    if variant is Variant.REAL:
        return float(value)
    if variant is Variant.REALS:
        return [float(v) for v in value]
    if variant is Variant.INTS:
        return [int(v) for v in value]
    if variant is Variant.TEXTS:
        return list(value)
    if variant is Variant.PAIRS:
        return [(str(k), str(v)) for k, v in value]
    return value


@dataclass(frozen=True)
class HetValue:
    variant: Variant
    value: Any

    @classmethod
    def of(cls, value) -> "HetValue":
        if isinstance(value, HetValue):
            return value
        variant = variant_of(value)
        return cls(variant, _normalize(value, variant))

    def accepts(self, requested: Variant) -> bool:
        if requested is self.variant:
            return True
        if requested is Variant.REAL and self.variant is Variant.INT:
            return True
        if requested is Variant.REALS and self.variant is Variant.INTS:
            return True
        # an empty list satisfies any list variant
        return requested in _LIST_VARIANTS and self.variant in _LIST_VARIANTS and not self.value

    def as_(self, requested: Variant, key="<value>"):
        requested = Variant(requested)
        if not self.accepts(requested):
            raise VariantMismatch(key, self.variant.value, requested.value)
        if requested is self.variant:
            return self.value
        return _normalize(self.value, requested)


class HetMap:
    def __init__(self, entries=None):
        self._entries: dict[str, HetValue] = {}
        for key, value in dict(entries or {}).items():
            self.insert(key, value)

    @classmethod
    def coerce(cls, options) -> "HetMap":
        if isinstance(options, HetMap):
            return options
        return cls(options)

    def insert(self, key: str, value):
        """Store value under key; returns the previous raw value or None."""
        previous = self._entries.get(key)
        self._entries[key] = HetValue.of(value)
        return previous.value if previous is not None else None

    def get(self, key: str, variant):
        entry = self._entries.get(key)
        if entry is None:
            raise KeyMissing(key)
        return entry.as_(Variant(variant), key)

    def get_or(self, key: str, variant, default=None):
        if key not in self._entries:
            return default
        return self.get(key, variant)

    def variant(self, key: str) -> Variant:
        entry = self._entries.get(key)
        if entry is None:
            raise KeyMissing(key)
        return entry.variant

    def remove(self, key: str):
        entry = self._entries.pop(key, None)
        return entry.value if entry is not None else None

    def update(self, other):
        for key, value in HetMap.coerce(other).items():
            self.insert(key, value)
        return self

    def copy(self) -> "HetMap":
        clone = HetMap()
        clone._entries = dict(self._entries)
        return clone

    def keys(self) -> list[str]:
        return list(self._entries)

    def items(self) -> Iterator[tuple[str, Any]]:
        for key, entry in self._entries.items():
            yield key, entry.value

    def to_json(self) -> dict:
        """JSON-safe view; opaque handles are dropped."""
        out = {}
        for key, entry in self._entries.items():
            if entry.variant is Variant.HANDLE:
                continue
            if entry.variant is Variant.PAIRS:
                out[key] = [list(p) for p in entry.value]
            else:
                out[key] = entry.value
        return out

    def __contains__(self, key):
        return key in self._entries

    def __getitem__(self, key):
        entry = self._entries.get(key)
        if entry is None:
            raise KeyMissing(key)
        return entry.value

    def __setitem__(self, key, value):
        self.insert(key, value)

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __eq__(self, other):
        if not isinstance(other, HetMap):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self):
        body = ", ".join(f"{k}={e.variant.value}:{e.value!r}" for k, e in self._entries.items())
        return f"HetMap({body})"
