"""Exact integer geometry: points, cross products and the cone predicates.

Every predicate here is decided with integer arithmetic only.  Comparisons
against multiples of sqrt(3) go through ``sqrt3_cmp``.
"""
from enum import Enum
from typing import NamedTuple

from .errors import ZeroVector


class Point(NamedTuple):
    x: int
    y: int

    def __add__(self, other):
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def __neg__(self):
        return Point(-self.x, -self.y)

    def __mul__(self, k):
        return Point(self.x * k, self.y * k)

    __rmul__ = __mul__


ORIGIN = Point(0, 0)


def cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def norm2(u):
    return u[0] * u[0] + u[1] * u[1]


def _sign(v):
    return (v > 0) - (v < 0)


def sqrt3_cmp(a, b):
    """Return -1, 0 or 1 as ``a*sqrt(3)`` is less than, equal to or greater than ``b``."""
    if a >= 0 and b <= 0:
        return 0 if a == 0 and b == 0 else 1
    if a <= 0 and b >= 0:
        return -1
    # same strict sign on both sides
    lhs, rhs = 3 * a * a, b * b
    if a > 0:
        return _sign(lhs - rhs)
    return _sign(rhs - lhs)


def rotate90(u, times=1):
    """Rotate counter-clockwise by ``times`` quarter turns."""
    x, y = u
    for _ in range(times % 4):
        x, y = -y, x
    return Point(x, y)


class Cone(Enum):
    Q1 = "Q1"
    Q2 = "Q2"
    Q3 = "Q3"
    Q4 = "Q4"
    Q1_PLUS = "Q1+"
    Q2_MINUS = "Q2-"
    Q3_PLUS = "Q3+"
    Q4_MINUS = "Q4-"


def quadrant(w):
    """Index 1..4 of the half-open quadrant containing a non-zero vector."""
    x, y = w
    if x > 0 and y >= 0:
        return 1
    if x <= 0 and y > 0:
        return 2
    if x < 0 and y <= 0:
        return 3
    if x >= 0 and y < 0:
        return 4
    raise ZeroVector("the zero vector lies in no quadrant")


def in_q1_plus(w):
    # the closed wedge from -30 to 120 degrees, origin removed
    x, y = w
    if x == 0 and y == 0:
        return False
    return sqrt3_cmp(y, -x) >= 0 and sqrt3_cmp(-x, y) <= 0


def in_q2_minus(w):
    # the open wedge from 120 to 150 degrees
    x, y = w
    return sqrt3_cmp(y, -x) > 0 and sqrt3_cmp(-x, y) > 0


def in_q3_plus(w):
    return in_q1_plus((-w[0], -w[1]))


def in_q4_minus(w):
    return in_q2_minus((-w[0], -w[1]))


def classify_cone(w):
    """Return the set of cones that contain ``w``."""
    if w[0] == 0 and w[1] == 0:
        raise ZeroVector("cannot classify the zero vector")
    cones = {Cone(f"Q{quadrant(w)}")}
    for cone, test in ((Cone.Q1_PLUS, in_q1_plus), (Cone.Q2_MINUS, in_q2_minus),
                       (Cone.Q3_PLUS, in_q3_plus), (Cone.Q4_MINUS, in_q4_minus)):
        if test(w):
            cones.add(cone)
    return frozenset(cones)


def precedes(u, v, order):
    """Partial orders on points: ``u <_order v`` iff ``v - u`` lies in the matching cone."""
    d = (v[0] - u[0], v[1] - u[1])
    if d == (0, 0):
        return False
    if order == 1:
        return in_q1_plus(d)
    if order == 2:
        return in_q2_minus(d)
    raise ValueError(f"unknown order {order}")
