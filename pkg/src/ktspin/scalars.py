"""Dual-number scalar used to carry first derivatives through the solver.

A ``DualScalar`` stores a value and a first derivative with respect to one
formal parameter; products follow the rule that the square of the formal
parameter vanishes.  Arithmetic mixes freely with plain numbers, so the
solver and energy accumulation run unchanged on either scalar kind.
"""

from __future__ import annotations

Number = (int, float, complex)


class DualScalar:
    """Value/derivative pair with truncated first-order arithmetic."""

    __slots__ = ("val", "der")

    def __init__(self, val, der=0j):
        self.val = complex(val)
        self.der = complex(der)

    def __repr__(self):
        return f"DualScalar({self.val!r}, {self.der!r})"

    def __add__(self, other):
        if isinstance(other, DualScalar):
            return DualScalar(self.val + other.val, self.der + other.der)
        if isinstance(other, Number):
            return DualScalar(self.val + other, self.der)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return DualScalar(-self.val, -self.der)

    def __sub__(self, other):
        if isinstance(other, DualScalar):
            return DualScalar(self.val - other.val, self.der - other.der)
        if isinstance(other, Number):
            return DualScalar(self.val - other, self.der)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Number):
            return DualScalar(other - self.val, -self.der)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, DualScalar):
            return DualScalar(self.val * other.val,
                              self.val * other.der + self.der * other.val)
        if isinstance(other, Number):
            return DualScalar(self.val * other, self.der * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, DualScalar):
            # (a + b eta) / (c + d eta) with c != 0
            q = self.val / other.val
            return DualScalar(q, (self.der - q * other.der) / other.val)
        if isinstance(other, Number):
            return DualScalar(self.val / other, self.der / other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, DualScalar):
            return self.val == other.val and self.der == other.der
        if isinstance(other, Number):
            return self.val == other and self.der == 0
        return NotImplemented

    def __ne__(self, other):
        eq = self.__eq__(other)
        if eq is NotImplemented:
            return eq
        return not eq

    def conjugate(self):
        return DualScalar(self.val.conjugate(), self.der.conjugate())


def value_part(x):
    """Value channel of a scalar (the scalar itself for plain numbers)."""
    return x.val if isinstance(x, DualScalar) else complex(x)


def derivative_part(x):
    """Derivative channel of a scalar (zero for plain numbers)."""
    return x.der if isinstance(x, DualScalar) else 0j


def scalar_abs(x):
    """Magnitude of the value channel."""
    return abs(x.val) if isinstance(x, DualScalar) else abs(x)
