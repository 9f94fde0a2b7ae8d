"""Explicit walks stored with hopset edges and cluster members."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import accumulate


@dataclass(frozen=True)
class Walk:
    vertices: tuple[int, ...]
    refs: tuple
    weights: tuple[float, ...]

    @classmethod
    def at(cls, v: int) -> "Walk":
        return cls((v,), (), ())

    @classmethod
    def from_parts(cls, vertices, refs, weights) -> "Walk":
        if len(vertices) != len(refs) + 1 or len(refs) != len(weights):
            raise ValueError("walk needs one more vertex than edges")
        return cls(tuple(vertices), tuple(refs), tuple(weights))

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def hops(self) -> int:
        return len(self.refs)

    @property
    def weight(self) -> float:
        return sum(self.weights)

    def cumulative(self) -> list[float]:
        return [0.0] + list(accumulate(self.weights))

    def reversed(self) -> "Walk":
        return Walk(self.vertices[::-1], self.refs[::-1], self.weights[::-1])

    def __add__(self, other: "Walk") -> "Walk":
        if self.end != other.start:
            raise ValueError(f"cannot join walk ending at {self.end} to one starting at {other.start}")
        return Walk(self.vertices + other.vertices[1:], self.refs + other.refs,
                    self.weights + other.weights)

    def loop_erased(self) -> "Walk":
        """Drop every closed sub-walk, keeping the first visit of each vertex."""
        verts, refs, wts = [self.vertices[0]], [], []
        pos = {self.vertices[0]: 0}
        for v, r, w in zip(self.vertices[1:], self.refs, self.weights):
            if v in pos:
                cut = pos[v]
                for dropped in verts[cut + 1:]:
                    del pos[dropped]
                del verts[cut + 1:]
                del refs[cut:]
                del wts[cut:]
            else:
                pos[v] = len(verts)
                verts.append(v)
                refs.append(r)
                wts.append(w)
        return Walk(tuple(verts), tuple(refs), tuple(wts))

    def to_json(self) -> list:
        return [list(self.vertices), [list(r) for r in self.refs], list(self.weights)]

    @classmethod
    def from_json(cls, data) -> "Walk":
        verts, refs, wts = data
        return cls.from_parts(verts, [tuple(r) for r in refs], [float(w) for w in wts])


class MemoryCapExceeded(RuntimeError):
    """A stored walk is longer than the configured cap."""
