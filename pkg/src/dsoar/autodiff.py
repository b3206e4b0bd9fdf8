"""Scalar forward-mode automatic differentiation with nestable dual numbers.

Iterated Lie brackets need directional derivatives of functions that are
themselves built from directional derivatives, five levels deep for the
longest bracket this package evaluates.  Finite differences lose several
digits per nesting level; dual numbers are exact to machine precision at
every level, so the whole tower stays at roundoff accuracy.

Each :func:`jvp` call perturbs its inputs with a fresh *level* tag.  When
duals from different levels meet in an arithmetic operation, the one with
the lower tag is treated as a constant with respect to the higher tag's
perturbation.  Levels come from a global monotone counter, so the innermost
active differentiation always carries the largest tag and nesting is safe.

Vector fields and cost functions that want to be differentiable by this
module must do their scalar math through the dual-aware functions defined
here (:func:`sin`, :func:`cos`, :func:`tan`, :func:`exp`, :func:`sqrt`,
:func:`log`) instead of the :mod:`math` equivalents.  On plain floats these
delegate straight to :mod:`math`, so there is no penalty for ordinary use.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Sequence

_LEVELS = itertools.count(1)


class Dual:
    """A first-order truncated Taylor scalar `re + du·eps` tagged by level.

    `re` and `du` may themselves be duals from enclosing differentiation
    levels, which is what makes nesting work.
    """

    __slots__ = ("level", "re", "du")

    def __init__(self, level, re, du):
        self.level = level
        self.re = re
        self.du = du

    # -- helpers ----------------------------------------------------------

    def _parts_of(self, other):
        """Coerce `other` to (re, du) parts at this dual's level."""
        if isinstance(other, Dual) and other.level == self.level:
            return other.re, other.du
        return other, 0.0

    def __repr__(self):
        return f"Dual(level={self.level}, re={self.re!r}, du={self.du!r})"

    def __float__(self):
        return float(primal(self))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Dual) and other.level > self.level:
            return other.__radd__(self)
        bre, bdu = self._parts_of(other)
        return Dual(self.level, self.re + bre, self.du + bdu)

    __radd__ = __add__

    def __neg__(self):
        return Dual(self.level, -self.re, -self.du)

    def __sub__(self, other):
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Dual) and other.level > self.level:
            return other.__rmul__(self)
        bre, bdu = self._parts_of(other)
        return Dual(self.level, self.re * bre, self.du * bre + self.re * bdu)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual) and other.level > self.level:
            return other.__rtruediv__(self)
        bre, bdu = self._parts_of(other)
        q = self.re / bre
        return Dual(self.level, q, (self.du - q * bdu) / bre)

    def __rtruediv__(self, other):
        # other / self with other constant at this level
        q = other / self.re
        return Dual(self.level, q, -q * self.du / self.re)

    def __pow__(self, n):
        if not isinstance(n, (int, float)):
            return NotImplemented
        return Dual(self.level, self.re ** n, n * self.re ** (n - 1) * self.du)

    # -- comparisons on primal values ---------------------------------------

    def __lt__(self, other):
        return primal(self) < primal(other)

    def __le__(self, other):
        return primal(self) <= primal(other)

    def __gt__(self, other):
        return primal(self) > primal(other)

    def __ge__(self, other):
        return primal(self) >= primal(other)

    def __abs__(self):
        return -self if primal(self) < 0.0 else self


def primal(x):
    """Strip all dual layers and return the underlying float."""
    while isinstance(x, Dual):
        x = x.re
    return x


# -- dual-aware elementary functions ----------------------------------------


def sin(x):
    if isinstance(x, Dual):
        return Dual(x.level, sin(x.re), cos(x.re) * x.du)
    return math.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(x.level, cos(x.re), -sin(x.re) * x.du)
    return math.cos(x)


def tan(x):
    if isinstance(x, Dual):
        c = cos(x.re)
        return Dual(x.level, tan(x.re), x.du / (c * c))
    return math.tan(x)


def exp(x):
    if isinstance(x, Dual):
        e = exp(x.re)
        return Dual(x.level, e, e * x.du)
    return math.exp(x)


def sqrt(x):
    if isinstance(x, Dual):
        r = sqrt(x.re)
        return Dual(x.level, r, x.du / (2.0 * r))
    return math.sqrt(x)


def log(x):
    if isinstance(x, Dual):
        return Dual(x.level, log(x.re), x.du / x.re)
    return math.log(x)


# -- transforms --------------------------------------------------------------


def jvp(
    fn: Callable[[Sequence], Sequence],
    x: Sequence,
    v: Sequence,
) -> tuple[list, list]:
    """Jacobian-vector product `(fn(x), J_fn(x) @ v)` in one forward sweep.

    `fn` maps a sequence of scalars to a sequence of scalars using the
    dual-aware math above.  Entries of `x` and `v` may themselves be duals
    from an enclosing `jvp`, which is how nested brackets are evaluated.
    """
    level = next(_LEVELS)
    xd = [Dual(level, xi, vi) for xi, vi in zip(x, v)]
    out = fn(xd)
    vals, dots = [], []
    for o in out:
        if isinstance(o, Dual) and o.level == level:
            vals.append(o.re)
            dots.append(o.du)
        else:
            vals.append(o)
            dots.append(0.0)
    return vals, dots


def jvp_scalar(fn: Callable[[Sequence], object], x: Sequence, v: Sequence):
    """Like :func:`jvp` for a scalar-valued `fn`; returns `(fn(x), dfn)`."""
    vals, dots = jvp(lambda xs: [fn(xs)], x, v)
    return vals[0], dots[0]
