from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SparseVector:
    """A vector of ambient dimension ``n`` stored as sorted (index, value) pairs.

    Zero values are dropped on construction so ``nnz`` is always the true
    l0 norm.
    """

    n: int
    indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        val = np.asarray(self.values, dtype=float).ravel()
        if idx.shape != val.shape:
            raise ValueError("indices and values must have the same length")
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise IndexError(f"sparse index outside [0, {self.n})")
        if np.unique(idx).size != idx.size:
            raise ValueError("duplicate indices in sparse vector")
        keep = val != 0
        order = np.argsort(idx[keep], kind="stable")
        object.__setattr__(self, "indices", idx[keep][order])
        object.__setattr__(self, "values", val[keep][order])

    @classmethod
    def zeros(cls, n: int) -> "SparseVector":
        return cls(n)

    @classmethod
    def from_dense(cls, x, tol: float = 0.0) -> "SparseVector":
        x = np.asarray(x, dtype=float)
        idx = np.flatnonzero(np.abs(x) > tol)
        return cls(x.size, idx, x[idx])

    @classmethod
    def from_entries(cls, n: int, entries) -> "SparseVector":
        entries = list(entries)
        if not entries:
            return cls(n)
        idx, val = zip(*entries)
        return cls(n, np.array(idx, dtype=np.int64), np.array(val, dtype=float))

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    @property
    def support(self) -> frozenset:
        return frozenset(int(i) for i in self.indices)

    def entries(self) -> list[tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self.indices, self.values)]

    def to_dense(self) -> np.ndarray:
        x = np.zeros(self.n)
        x[self.indices] = self.values
        return x

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.n, self.indices.tobytes(), self.values.tobytes()))

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "entries": [[i, v] for i, v in self.entries()]})

    @classmethod
    def from_json(cls, text: str) -> "SparseVector":
        obj = json.loads(text)
        if "n" not in obj or "entries" not in obj:
            raise ValueError('sparse vector JSON needs "n" and "entries" keys')
        return cls.from_entries(int(obj["n"]), [(int(i), float(v)) for i, v in obj["entries"]])
