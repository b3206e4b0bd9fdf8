"""Numeric iterated Lie brackets and the accessibility rank test.

Bracket expressions are data: :class:`FormalBracket` is a binary tree over
named vector fields (`f` for the drift, `b`/`b1`/`b2`... for controls),
parsed from strings like ``"[f,[f,b]]"``.  Keeping them symbolic makes the
bracket sets used in rank tests configurable and reportable, and lets the
same tree carry the combinatorial bookkeeping (occurrence counts, weights)
used to classify obstructions.

Evaluation uses the convention

    [F, G](x) = dG/dx(x) F(x) - dF/dx(x) G(x).

Two numeric routes are provided and cross-checked against each other:

* ``forward`` (default): nested dual-number directional differentiation
  (:mod:`dsoar.autodiff`), exact to machine precision at every nesting
  level, so depth-6 brackets come out at roundoff accuracy.
* ``central``: Richardson-extrapolated central differences (a 5-point,
  4th-order stencil per directional derivative) with steps widened at each
  nesting level to stand off the noise of the level below.  A step sweep
  flags non-convergent evaluations instead of returning garbage.

The rank test stacks the bracket vectors at a point, normalizes each
column to unit length (bracket magnitudes span orders of magnitude), drops
exact zeros, and counts singular values above a relative threshold.

The weight bookkeeping answers the neutralization question for this
package's soaring system: the lone bad bracket `[b,[f,b]]` (one drift
occurrence, two of the control) must outweigh every good bracket used in
the spanning set, which reduces to four integer inequalities
`w0 + 2w > k*w0 + w` for `k = 2..5`; any weight with `w > 4*w0` works and
`(1, 5)` is the smallest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import autodiff as ad

MAX_BRACKET_DEPTH = 6

# neutralization inequalities for the soaring system: the bad bracket
# [b,[f,b]] against the good brackets ad^k_f b for these k
NEUTRALIZATION_KS = (2, 3, 4, 5)


class NumericBreakdownError(RuntimeError):
    """A finite-difference bracket evaluation failed its step sweep."""


# ---------------------------------------------------------------------------
# formal bracket expressions
# ---------------------------------------------------------------------------

_SYMBOL_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class FormalBracket:
    """A leaf vector-field symbol or a bracket of two sub-expressions."""

    symbol: str | None = None
    left: "FormalBracket | None" = None
    right: "FormalBracket | None" = None

    def __post_init__(self):
        is_leaf = self.symbol is not None
        is_node = self.left is not None and self.right is not None
        if is_leaf == is_node:
            raise ValueError("a bracket is either a symbol or a [left,right] pair")

    @classmethod
    def leaf(cls, symbol: str) -> "FormalBracket":
        return cls(symbol=symbol)

    @classmethod
    def of(cls, left: "FormalBracket", right: "FormalBracket") -> "FormalBracket":
        return cls(left=left, right=right)

    @classmethod
    def parse(cls, text: str) -> "FormalBracket":
        """Parse ``"f"`` or ``"[f,[f,b]]"`` style bracket expressions."""
        expr, rest = cls._parse(text.replace(" ", ""), 0)
        if rest != len(text.replace(" ", "")):
            raise ValueError(f"trailing characters in bracket expression {text!r}")
        return expr

    @classmethod
    def _parse(cls, s: str, i: int):
        if i < len(s) and s[i] == "[":
            left, i = cls._parse(s, i + 1)
            if i >= len(s) or s[i] != ",":
                raise ValueError(f"expected ',' at position {i} of {s!r}")
            right, i = cls._parse(s, i + 1)
            if i >= len(s) or s[i] != "]":
                raise ValueError(f"expected ']' at position {i} of {s!r}")
            return cls.of(left, right), i + 1
        m = _SYMBOL_RE.match(s, i)
        if not m:
            raise ValueError(f"expected a field name at position {i} of {s!r}")
        return cls.leaf(m.group()), m.end()

    def __str__(self) -> str:
        if self.symbol is not None:
            return self.symbol
        return f"[{self.left},{self.right}]"

    @property
    def is_leaf(self) -> bool:
        return self.symbol is not None

    @property
    def depth(self) -> int:
        """Nesting depth: 1 for a leaf, 1 + max of children for a bracket."""
        if self.is_leaf:
            return 1
        return 1 + max(self.left.depth, self.right.depth)

    def occurrences(self) -> dict[str, int]:
        """Leaf tally: how many times each field symbol appears."""
        if self.is_leaf:
            return {self.symbol: 1}
        counts = self.left.occurrences()
        for sym, k in self.right.occurrences().items():
            counts[sym] = counts.get(sym, 0) + k
        return counts

    def count(self, symbol: str) -> int:
        return self.occurrences().get(symbol, 0)

    def weight(self, weights: dict[str, int]) -> int:
        """w-weight: sum of per-symbol weights times occurrence counts."""
        return sum(weights[sym] * k for sym, k in self.occurrences().items())

    def is_obstruction_candidate(self, drift: str = "f") -> bool:
        """Odd drift count and even count of every control field (a bad bracket)."""
        occ = self.occurrences()
        if occ.get(drift, 0) % 2 == 0:
            return False
        return all(k % 2 == 0 for sym, k in occ.items() if sym != drift)


def ad_bracket(k: int, drift: str = "f", control: str = "b") -> FormalBracket:
    """The k-times iterated bracket `[f,[f,...[f,b]...]]` as an expression."""
    expr = FormalBracket.leaf(control)
    f = FormalBracket.leaf(drift)
    for _ in range(k):
        expr = FormalBracket.of(f, expr)
    return expr


# the spanning set for the 7-state soaring system: drift, control, and the
# iterated brackets ad^1..ad^5 of the drift on the control
DS_BRACKETS = ("f", "b", "[f,b]", "[f,[f,b]]", "[f,[f,[f,b]]]",
               "[f,[f,[f,[f,b]]]]", "[f,[f,[f,[f,[f,b]]]]]")
# the same set without [f,b]; only six directions, so its rank caps at 6
DS_BRACKETS_NO_AD1 = tuple(s for s in DS_BRACKETS if s != "[f,b]")
DS_BAD_BRACKET = "[b,[f,b]]"


# ---------------------------------------------------------------------------
# differentiation schemes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiffScheme:
    """How directional derivatives inside brackets are computed.

    `forward` uses exact dual-number sweeps and ignores the step fields.
    `central` uses a 4th-order central stencil with step
    `base_step * widen**level`, where level counts how many bracket layers
    sit below the function being differentiated (deeper means noisier, so
    wider).  With `sweep_ratio` set, every evaluation is repeated at the
    swept step and a relative disagreement above `sweep_tol` raises
    :class:`NumericBreakdownError`.
    """

    kind: str = "forward"
    base_step: float = 3e-3
    widen: float = 4.0
    sweep_ratio: float | None = None
    sweep_tol: float = 1e-3

    def __post_init__(self):
        if self.kind not in ("forward", "central"):
            raise ValueError(f"unknown differentiation kind {self.kind!r}")
        if self.base_step <= 0.0 or self.widen < 1.0:
            raise ValueError("base_step must be > 0 and widen >= 1")


FORWARD = DiffScheme(kind="forward")
CENTRAL = DiffScheme(kind="central")


def numeric_jacobian(fn, x, eps: float = 1e-6, richardson: bool = False) -> np.ndarray:
    """Central-difference Jacobian of `fn` at `x`.

    Per-coordinate step `eps * max(1, |x_i|)`; with `richardson=True` the
    half-step estimate is extrapolated once, giving 4th-order accuracy.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    fx = np.asarray(fn(x), dtype=float)
    if not np.all(np.isfinite(fx)):
        raise ValueError("vector field is not finite at the base point")

    def central(h_scale):
        cols = []
        for i in range(n):
            h = eps * max(1.0, abs(x[i])) * h_scale
            xp = x.copy()
            xm = x.copy()
            xp[i] += h
            xm[i] -= h
            fp = np.asarray(fn(xp), dtype=float)
            fm = np.asarray(fn(xm), dtype=float)
            if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
                raise ValueError(f"vector field is not finite near x[{i}]")
            cols.append((fp - fm) / (2.0 * h))
        return np.stack(cols, axis=1)

    jac = central(1.0)
    if richardson:
        jac = (4.0 * central(0.5) - jac) / 3.0
    return jac


# ---------------------------------------------------------------------------
# bracket evaluation
# ---------------------------------------------------------------------------


def _forward_evaluator(expr: FormalBracket, fields: dict):
    """Build a dual-capable callable evaluating `expr` pointwise."""
    if expr.is_leaf:
        try:
            return fields[expr.symbol]
        except KeyError:
            raise KeyError(f"no vector field named {expr.symbol!r}") from None
    left = _forward_evaluator(expr.left, fields)
    right = _forward_evaluator(expr.right, fields)

    def bracket(x):
        fx = left(x)
        gx = right(x)
        _, jg_f = ad.jvp(right, x, fx)
        _, jf_g = ad.jvp(left, x, gx)
        return [a - b for a, b in zip(jg_f, jf_g)]

    return bracket


def _levels_below(expr: FormalBracket) -> int:
    return expr.depth - 1


def _central_eval(expr: FormalBracket, fields: dict, x: np.ndarray,
                  scheme: DiffScheme, step_scale: float) -> np.ndarray:
    if expr.is_leaf:
        return np.asarray(fields[expr.symbol](x), dtype=float)
    fx = _central_eval(expr.left, fields, x, scheme, step_scale)
    gx = _central_eval(expr.right, fields, x, scheme, step_scale)
    jg_f = _central_dirderiv(expr.right, fields, x, fx, scheme, step_scale)
    jf_g = _central_dirderiv(expr.left, fields, x, gx, scheme, step_scale)
    return jg_f - jf_g


def _central_dirderiv(expr: FormalBracket, fields: dict, x: np.ndarray,
                      v: np.ndarray, scheme: DiffScheme,
                      step_scale: float) -> np.ndarray:
    """4th-order directional derivative of `expr`'s field at `x` along `v`."""
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        return np.zeros_like(x)
    u = v / nv
    h = scheme.base_step * scheme.widen ** _levels_below(expr) * step_scale

    def g(s):
        return _central_eval(expr, fields, x + s * u, scheme, step_scale)

    stencil = (-g(2.0 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2.0 * h)) / (12.0 * h)
    return nv * stencil


def nested_bracket(expr: FormalBracket | str, fields: dict, x,
                   scheme: DiffScheme = FORWARD,
                   max_depth: int = MAX_BRACKET_DEPTH) -> np.ndarray:
    """Evaluate an iterated Lie bracket expression at state `x`.

    `fields` maps leaf symbols to vector-field callables.  For the forward
    scheme the callables must be dual-safe (scalar math through
    :mod:`dsoar.autodiff`); the central scheme only ever calls them on
    plain float vectors.
    """
    if isinstance(expr, str):
        expr = FormalBracket.parse(expr)
    if expr.depth > max_depth:
        raise ValueError(
            f"bracket depth {expr.depth} exceeds the configured maximum {max_depth}"
        )
    if scheme.kind == "forward":
        out = _forward_evaluator(expr, fields)(list(np.asarray(x, dtype=float)))
        return np.asarray(out, dtype=float)

    x = np.asarray(x, dtype=float)
    value = _central_eval(expr, fields, x, scheme, 1.0)
    if scheme.sweep_ratio is not None and not expr.is_leaf:
        swept = _central_eval(expr, fields, x, scheme, scheme.sweep_ratio)
        scale = max(float(np.linalg.norm(value)), float(np.linalg.norm(swept)))
        if scale > 0.0:
            diff = float(np.linalg.norm(value - swept)) / scale
            if diff > scheme.sweep_tol:
                raise NumericBreakdownError(
                    f"step sweep disagreement {diff:.3e} on {expr} "
                    f"(steps x1 vs x{scheme.sweep_ratio:g})"
                )
    return value


def lie_bracket(f_field, g_field, x, scheme: DiffScheme = FORWARD) -> np.ndarray:
    """`[F,G](x) = J_G(x) F(x) - J_F(x) G(x)` for two field callables."""
    fields = {"F": f_field, "G": g_field}
    return nested_bracket(FormalBracket.parse("[F,G]"), fields, x, scheme)


# ---------------------------------------------------------------------------
# rank test and reports
# ---------------------------------------------------------------------------


@dataclass
class LarcReport:
    """Outcome of the accessibility rank test at a point."""

    brackets: list[str]
    used: list[str]
    dropped: list[str]
    singular_values: list[float]
    rank: int
    dimension: int
    full_rank: bool
    tolerance: float

    def as_dict(self) -> dict:
        return {
            "brackets": self.brackets,
            "used": self.used,
            "dropped_zero_brackets": self.dropped,
            "singular_values": self.singular_values,
            "rank": self.rank,
            "dimension": self.dimension,
            "full_rank": self.full_rank,
            "tolerance": self.tolerance,
        }


@dataclass
class BadBracketStatus:
    """Whether a potential obstruction bracket vanishes and lies in a span."""

    bracket: str
    value: list[float]
    norm: float
    reference_norm: float
    nonvanishing: bool
    in_span: bool
    residual: float

    def as_dict(self) -> dict:
        return {
            "bracket": self.bracket,
            "value": self.value,
            "norm": self.norm,
            "largest_distribution_column_norm": self.reference_norm,
            "nonvanishing": self.nonvanishing,
            "in_span": self.in_span,
            "projection_residual": self.residual,
        }


@dataclass
class WeightCheck:
    """Result of the four neutralization inequalities for a weight pair."""

    w0: int
    w: int
    admissible: bool
    inequalities: dict[int, bool]
    passed: bool

    def as_dict(self) -> dict:
        return {
            "w0": self.w0,
            "w": self.w,
            "admissible": self.admissible,
            "inequalities": {str(k): v for k, v in self.inequalities.items()},
            "passed": self.passed,
        }


def bracket_matrix(brackets, fields: dict, x,
                   scheme: DiffScheme = FORWARD) -> tuple[np.ndarray, list[str]]:
    """Stack bracket vectors at `x` as columns; returns (matrix, names)."""
    exprs = [FormalBracket.parse(b) if isinstance(b, str) else b for b in brackets]
    cols = [nested_bracket(e, fields, x, scheme) for e in exprs]
    return np.stack(cols, axis=1), [str(e) for e in exprs]


def larc_rank(brackets, fields: dict, x, tol: float = 1e-8,
              scheme: DiffScheme = FORWARD) -> LarcReport:
    """Rank of the span of `brackets` evaluated at `x`.

    Columns are normalized to unit length before the SVD so that the
    relative singular-value threshold `tol` is meaningful across bracket
    magnitudes spanning orders of magnitude; exact zero vectors are dropped
    (and reported) rather than normalized.
    """
    if not brackets:
        raise ValueError("bracket list must be nonempty")
    matrix, names = bracket_matrix(brackets, fields, x, scheme)
    norms = np.linalg.norm(matrix, axis=0)
    biggest = float(norms.max())
    keep = norms > 1e-12 * max(biggest, 1e-300)
    used = [n for n, k in zip(names, keep) if k]
    dropped = [n for n, k in zip(names, keep) if not k]
    dimension = matrix.shape[0]
    if not used:
        return LarcReport(brackets=names, used=[], dropped=dropped,
                          singular_values=[], rank=0, dimension=dimension,
                          full_rank=False, tolerance=tol)
    unit = matrix[:, keep] / norms[keep]
    sigma = np.linalg.svd(unit, compute_uv=False)
    rank = int(np.sum(sigma > tol * sigma[0]))
    return LarcReport(brackets=names, used=used, dropped=dropped,
                      singular_values=[float(s) for s in sigma], rank=rank,
                      dimension=dimension, full_rank=rank == dimension,
                      tolerance=tol)


def bad_bracket_check(fields: dict, x, distribution=DS_BRACKETS,
                      bad_bracket: str = DS_BAD_BRACKET, tol: float = 1e-6,
                      scheme: DiffScheme = FORWARD) -> BadBracketStatus:
    """Evaluate an obstruction-candidate bracket and test it against a span.

    Nonvanishing means its norm exceeds `tol` times the largest column norm
    of the distribution; in-span means the relative least-squares residual
    of projecting it onto the distribution columns is at most `tol`.
    """
    value = nested_bracket(bad_bracket, fields, x, scheme)
    matrix, _ = bracket_matrix(distribution, fields, x, scheme)
    norms = np.linalg.norm(matrix, axis=0)
    reference = float(norms.max())
    norm = float(np.linalg.norm(value))
    nonvanishing = norm > tol * reference
    if norm == 0.0:
        return BadBracketStatus(bracket=str(bad_bracket), value=list(value),
                                norm=norm, reference_norm=reference,
                                nonvanishing=False, in_span=True, residual=0.0)
    keep = norms > 0.0
    unit = matrix[:, keep] / norms[keep]
    coeff, _, _, _ = np.linalg.lstsq(unit, value, rcond=None)
    residual = float(np.linalg.norm(unit @ coeff - value)) / norm
    return BadBracketStatus(bracket=str(bad_bracket), value=[float(v) for v in value],
                            norm=norm, reference_norm=reference,
                            nonvanishing=nonvanishing,
                            in_span=residual <= tol, residual=residual)


def weight_neutralization(w0: int, w: int) -> WeightCheck:
    """Check `w0 + 2w > k*w0 + w` for `k = 2..5` (soaring neutralization).

    The left side is the weight of the bad bracket `[b,[f,b]]`; the right
    sides are the weights of the good brackets `ad^k_f b` in the spanning
    set.  `admissible` additionally requires `w >= w0 >= 1` (bounded,
    hyper-cube control sets); the overall pass needs both.
    """
    if w0 < 1 or w < 1:
        raise ValueError("weights must be positive integers")
    bad = w0 + 2 * w
    inequalities = {k: bad > k * w0 + w for k in NEUTRALIZATION_KS}
    admissible = w >= w0
    return WeightCheck(w0=w0, w=w, admissible=admissible,
                       inequalities=inequalities,
                       passed=admissible and all(inequalities.values()))


def find_admissible_weight(max_w0: int = 3, max_w: int = 10):
    """Lexicographically smallest `(w0, w)` passing the neutralization check.

    Returns `None` when no pair within the bounds passes.
    """
    if max_w0 < 1 or max_w < 1:
        raise ValueError("bounds must be at least 1")
    for w0 in range(1, max_w0 + 1):
        for w in range(w0, max_w + 1):
            if weight_neutralization(w0, w).passed:
                return (w0, w)
    return None


def scheme_agreement(brackets, fields: dict, x,
                     forward: DiffScheme = FORWARD,
                     central: DiffScheme = CENTRAL) -> dict[str, float]:
    """Relative disagreement between the two schemes per bracket."""
    out = {}
    for b in brackets:
        a = nested_bracket(b, fields, x, forward)
        c = nested_bracket(b, fields, x, central)
        scale = max(float(np.linalg.norm(a)), float(np.linalg.norm(c)))
        out[str(b)] = 0.0 if scale == 0.0 else float(np.linalg.norm(a - c)) / scale
    return out
