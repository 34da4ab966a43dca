"""Forward-mode dual scalars carrying a value and four shape-parameter partials.

The whole operator-assembly pipeline is written in plain arithmetic, so running
it on ``DualScalar`` inputs propagates exact derivatives of every downstream
quantity (in particular the characteristic-polynomial coefficients) with
respect to (alpha, beta, gamma, delta). This replaces symbolic differentiation:
the computed partials are the exact derivatives of the composite map, up to
floating-point rounding of each elementary operation.
"""

from __future__ import annotations

import numpy as np

N_PARAMS = 4


class DualScalar:
    """value + gradient pair with overloaded arithmetic.

    Partials are a length-4 float array ordered (alpha, beta, gamma, delta).
    Composition is deterministic: the same expression on the same inputs
    produces bit-identical values and partials.
    """

    __slots__ = ("value", "partials")

    def __init__(self, value, partials=None):
        self.value = float(value)
        if partials is None:
            self.partials = np.zeros(N_PARAMS)
        else:
            self.partials = np.asarray(partials, dtype=float)

    @classmethod
    def seed(cls, value, index):
        """Independent variable number ``index`` (0..3)."""
        p = np.zeros(N_PARAMS)
        p[index] = 1.0
        return cls(value, p)

    def __repr__(self):
        return f"DualScalar({self.value!r}, {self.partials!r})"

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, DualScalar):
            return DualScalar(self.value + other.value, self.partials + other.partials)
        return DualScalar(self.value + other, self.partials)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, DualScalar):
            return DualScalar(self.value - other.value, self.partials - other.partials)
        return DualScalar(self.value - other, self.partials)

    def __rsub__(self, other):
        return DualScalar(other - self.value, -self.partials)

    def __mul__(self, other):
        if isinstance(other, DualScalar):
            return DualScalar(
                self.value * other.value,
                self.partials * other.value + self.value * other.partials,
            )
        return DualScalar(self.value * other, self.partials * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, DualScalar):
            inv = 1.0 / other.value
            return DualScalar(
                self.value * inv,
                (self.partials - (self.value * inv) * other.partials) * inv,
            )
        return DualScalar(self.value / other, self.partials / other)

    def __rtruediv__(self, other):
        inv = 1.0 / self.value
        val = other * inv
        return DualScalar(val, (-val * inv) * self.partials)

    def __neg__(self):
        return DualScalar(-self.value, -self.partials)

    def __pow__(self, power):
        if not isinstance(power, int) or power < 1:
            raise TypeError("DualScalar powers must be positive integers")
        out = self
        for _ in range(power - 1):
            out = out * self
        return out


def value_of(x):
    """Float value of a DualScalar or plain number."""
    if isinstance(x, DualScalar):
        return x.value
    return float(x)


def partials_of(x):
    """Gradient of a DualScalar; zeros for a plain number."""
    if isinstance(x, DualScalar):
        return x.partials
    return np.zeros(N_PARAMS)
