"""Points of X = sl(V) x V x V*."""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import DimensionError, Matrix
from .scalars import field_from_spec, field_to_spec, parse_rational, scalar_to_json


@dataclass(frozen=True)
class PointX:
    A: Matrix
    v: tuple
    phi: tuple

    def __post_init__(self):
        n = self.A.n
        if len(self.v) != n or len(self.phi) != n:
            raise DimensionError("v and phi must have the dimension of A")
        if self.A.trace():
            raise ValueError("the operator component of a point of X must be traceless")

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def field(self):
        return self.A.field

    def to_json(self) -> dict:
        return {
            "field": field_to_spec(self.field),
            "A": [[scalar_to_json(x) for x in r] for r in self.A.rows],
            "v": [scalar_to_json(x) for x in self.v],
            "phi": [scalar_to_json(x) for x in self.phi],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PointX":
        f = field_from_spec(obj.get("field", "Q"))

        def rd(x):
            return f(parse_rational(x) if isinstance(x, str) else x)

        A = Matrix([[rd(x) for x in r] for r in obj["A"]], f)
        return cls(A, tuple(rd(x) for x in obj["v"]), tuple(rd(x) for x in obj["phi"]))


def point(A: Matrix, v, phi) -> PointX:
    f = A.field
    return PointX(A, tuple(f(x) for x in v), tuple(f(x) for x in phi))
