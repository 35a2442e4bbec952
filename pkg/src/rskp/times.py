"""Sparse multi-time vectors for the hierarchy flows."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TimeVector:
    """Finitely supported assignment k -> t_k of hierarchy times.

    Entries are stored as a sorted tuple of (k, value) pairs with all
    indices >= 1 and all values nonzero.  Instances are immutable and
    hashable, so they can ride along inside frozen state objects.
    """

    entries: tuple = field(default=())

    def __post_init__(self):
        items = []
        for k, v in self.entries:
            k = int(k)
            v = float(v)
            if k < 1:
                raise ValueError(f"flow index must be >= 1, got {k}")
            if v != 0.0:
                items.append((k, v))
        items.sort()
        keys = [k for k, _ in items]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate flow index in TimeVector")
        object.__setattr__(self, "entries", tuple(items))

    @classmethod
    def zero(cls) -> "TimeVector":
        return cls(())

    @classmethod
    def from_dict(cls, d) -> "TimeVector":
        return cls(tuple(d.items()))

    def get(self, k: int) -> float:
        for kk, v in self.entries:
            if kk == k:
                return v
        return 0.0

    def with_entry(self, k: int, value: float) -> "TimeVector":
        """Return a copy with t_k set to value (replacing any old entry)."""
        items = [(kk, v) for kk, v in self.entries if kk != k]
        items.append((k, value))
        return TimeVector(tuple(items))

    def added(self, k: int, delta: float) -> "TimeVector":
        """Return a copy with delta added to t_k."""
        return self.with_entry(k, self.get(k) + delta)

    def plus(self, other: "TimeVector") -> "TimeVector":
        out = self
        for k, v in other.entries:
            out = out.added(k, v)
        return out

    @property
    def k_max(self) -> int:
        return max((k for k, _ in self.entries), default=0)

    def to_dict(self) -> dict:
        return {k: v for k, v in self.entries}

    def __bool__(self) -> bool:
        return bool(self.entries)
