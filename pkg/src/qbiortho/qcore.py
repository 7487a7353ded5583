"""q-shifted factorials, infinite q-products and terminating basic hypergeometric series.

Every routine works in one of two numeric modes:

* exact: :class:`fractions.Fraction` (plain ``int`` is accepted and stays exact);
* float: ``float``/``complex``, numpy arrays of those, or mpmath ``mpf``/``mpc``
  values for extended precision.

Mixing a ``Fraction`` with a floating value raises :class:`ModeMismatch` instead
of letting Python coerce silently.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .errors import (
    DenominatorPole,
    InvalidParameters,
    ModeMismatch,
    NonConvergent,
    NonTerminating,
    PoleError,
)

try:  # mpmath is optional; it only widens the set of accepted float types
    import mpmath
    _MP_TYPES: tuple[type, ...] = (mpmath.mpf, mpmath.mpc)
except ImportError:  # pragma: no cover
    mpmath = None
    _MP_TYPES = ()

Scalar = Any

EXACT = "exact"
FLOAT = "float"

DEFAULT_TOL = 1e-16
MIN_INF_TERMS = 20
MAX_INF_TERMS = 100_000
# float-mode detection of a = q^{-n}
TERMINATION_RTOL = 1e-10


def mode_of(*values: Scalar) -> str | None:
    """Return ``"exact"``, ``"float"`` or ``None`` (only ints seen).

    Raises ModeMismatch when exact rationals and floats are mixed.
    """
    seen_exact = seen_float = False
    for v in values:
        if isinstance(v, (bool, int, np.integer)):
            continue
        if isinstance(v, Fraction):
            seen_exact = True
        elif isinstance(v, (float, complex, np.floating, np.complexfloating, np.ndarray)) or (
            _MP_TYPES and isinstance(v, _MP_TYPES)
        ):
            seen_float = True
        elif isinstance(v, numbers.Rational):
            seen_exact = True
        elif isinstance(v, numbers.Complex):
            seen_float = True
        else:
            raise TypeError(f"unsupported scalar type {type(v).__name__}")
        if seen_exact and seen_float:
            raise ModeMismatch("exact rational mixed with floating point value")
    if seen_exact:
        return EXACT
    if seen_float:
        return FLOAT
    return None


def to_exact(value: Scalar) -> Fraction:
    """Convert ints, Fractions and ``"num/den"`` strings to a Fraction.

    Floats are refused: an exact value must never come from a binary float.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, float, complex, np.floating)):
        raise ModeMismatch(f"refusing to convert floating value {value!r} to an exact rational")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        text = value.strip()
        if any(ch in text for ch in ".eE") and "/" not in text:
            raise ModeMismatch(f"decimal literal {value!r} is not an exact rational")
        return Fraction(text)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def rational_sqrt(x: Fraction) -> Fraction:
    """Exact square root of a nonnegative rational that is a perfect square."""
    x = to_exact(x)
    if x < 0:
        raise ValueError("negative rational has no real square root")
    num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if num * num != x.numerator or den * den != x.denominator:
        raise ValueError(f"{x} is not the square of a rational")
    return Fraction(num, den)


@dataclass(frozen=True)
class QBase:
    """The base q of all q-products, validated on construction."""

    q: Scalar

    def __post_init__(self) -> None:
        mode = mode_of(self.q)
        if mode == EXACT or mode is None:
            q = to_exact(self.q)
            object.__setattr__(self, "q", q)
            if not 0 < q < 1:
                raise InvalidParameters(f"exact base must satisfy 0 < q < 1, got {q}")
        else:
            if isinstance(self.q, np.ndarray):
                raise InvalidParameters("the base must be a scalar")
            if not abs(self.q) < 1:
                raise InvalidParameters(f"base must satisfy |q| < 1, got {self.q}")
            if self.q == 0:
                raise InvalidParameters("base must be nonzero")

    @property
    def mode(self) -> str:
        return EXACT if isinstance(self.q, Fraction) else FLOAT


def _base(base: QBase | Scalar) -> Scalar:
    return base.q if isinstance(base, QBase) else base


def _is_zero(x: Scalar) -> bool:
    if isinstance(x, np.ndarray):
        return bool(np.any(x == 0))
    return x == 0


def _as_exact_result(x: Scalar, mode: str | None) -> Scalar:
    if mode != FLOAT and isinstance(x, int):
        return Fraction(x)
    return x


def qpochhammer(a: Scalar, base: QBase | Scalar, n: int) -> Scalar:
    """(a; q)_n for any integer n.

    Negative indices use (a; q)_{-m} = 1 / (a q^{-m}; q)_m.
    """
    q = _base(base)
    mode = mode_of(a, q)
    n = int(n)
    if n >= 0:
        result: Scalar = 1
        t = a
        for _ in range(n):
            result = result * (1 - t)
            t = t * q
        return _as_exact_result(result, mode)
    m = -n
    qinv = 1 / q if mode != FLOAT else q ** -1
    denom: Scalar = 1
    t = a * qinv
    for k in range(1, m + 1):
        f = 1 - t
        if _is_zero(f):
            raise PoleError(f"({a}; q)_{n}: factor 1 - a q^-{k} vanishes")
        denom = denom * f
        t = t * qinv
    return _as_exact_result(1 / denom if mode != FLOAT else 1.0 / denom, mode)


def qpochhammer_multi(params: Sequence[Scalar], base: QBase | Scalar, n: int) -> Scalar:
    """(a_1, ..., a_r; q)_n, the product of the individual q-shifted factorials."""
    q = _base(base)
    mode = mode_of(q, *params)
    result: Scalar = 1
    for a in params:
        result = result * qpochhammer(a, q, n)
    return _as_exact_result(result, mode)


def qpochhammer_inf(a: Scalar, base: QBase | Scalar, tol: float = DEFAULT_TOL) -> Scalar:
    """(a; q)_inf in float mode.

    The product stops at the first k >= 20 with |a q^k| < tol * (1 - |q|), which
    bounds the relative truncation error by about tol. ``a`` may be a numpy array.
    """
    q = _base(base)
    if mode_of(a, q) == EXACT:
        raise ModeMismatch("infinite products are only available in float mode")
    absq = abs(q)
    if not absq < 1:
        raise NonConvergent(f"(a; q)_inf needs |q| < 1, got |q| = {absq}")
    threshold = tol * (1 - absq)
    result: Scalar = 1
    t = a
    for k in range(MAX_INF_TERMS):
        result = result * (1 - t)
        t = t * q
        if k + 1 >= MIN_INF_TERMS:
            size = np.max(np.abs(t)) if isinstance(t, np.ndarray) else abs(t)
            if size < threshold:
                return result
    raise NonConvergent(f"(a; q)_inf did not reach tol={tol} in {MAX_INF_TERMS} factors")


def qpochhammer_inf_multi(params: Sequence[Scalar], base: QBase | Scalar, tol: float = DEFAULT_TOL) -> Scalar:
    result: Scalar = 1
    for a in params:
        result = result * qpochhammer_inf(a, base, tol)
    return result


def h_factor(theta: Scalar, params: Sequence[Scalar], base: QBase | Scalar, tol: float = DEFAULT_TOL) -> Scalar:
    """h(cos theta; a_1, ..., a_m; q) = prod_j (a_j e^{i theta}, a_j e^{-i theta}; q)_inf.

    Real parameters and real theta give a real result, computed from the
    factorised form 1 - 2 a q^k cos(theta) + a^2 q^{2k}.
    """
    q = _base(base)
    if mode_of(q, *params) == EXACT:
        raise ModeMismatch("h(cos theta; ...) needs e^{i theta} and is float-only")
    all_real = not np.iscomplexobj(np.asarray(theta)) and all(
        not np.iscomplexobj(np.asarray(a)) for a in params
    ) and not np.iscomplexobj(np.asarray(q))
    if not all_real:
        z = np.exp(1j * np.asarray(theta)) if isinstance(theta, np.ndarray) else _cexp(theta)
        result: Scalar = 1
        for a in params:
            result = result * qpochhammer_inf(a * z, q, tol) * qpochhammer_inf(a / z, q, tol)
        return result
    absq = abs(q)
    threshold = tol * (1 - absq)
    two_cos = 2 * (np.cos(theta) if isinstance(theta, np.ndarray) else _cos(theta))
    result = 1
    for a in params:
        if a == 0:
            continue
        t = a
        for k in range(MAX_INF_TERMS):
            result = result * (1 - t * two_cos + t * t)
            t = t * q
            if k + 1 >= MIN_INF_TERMS and abs(t) < threshold:
                break
        else:
            raise NonConvergent("h factor did not converge")
    return result


def _cexp(theta: Scalar) -> Scalar:
    if _MP_TYPES and isinstance(theta, _MP_TYPES):
        return mpmath.expj(theta)
    return complex(math.cos(theta), math.sin(theta)) if isinstance(theta, (int, float)) else np.exp(1j * theta)


def _cos(theta: Scalar) -> Scalar:
    if _MP_TYPES and isinstance(theta, _MP_TYPES):
        return mpmath.cos(theta)
    return math.cos(theta)


@dataclass(frozen=True)
class SeriesSpec:
    """Parameters of an r-phi-s series with argument z.

    ``max_terms`` caps non-terminating sums and the search for a terminating
    numerator parameter q^{-k}.
    """

    numerator: tuple[Scalar, ...]
    denominator: tuple[Scalar, ...]
    base: QBase
    argument: Scalar
    max_terms: int = 1000

    def __post_init__(self) -> None:
        object.__setattr__(self, "numerator", tuple(self.numerator))
        object.__setattr__(self, "denominator", tuple(self.denominator))
        if not isinstance(self.base, QBase):
            object.__setattr__(self, "base", QBase(self.base))
        if self.max_terms < 1:
            raise InvalidParameters("max_terms must be positive")
        mode_of(self.base.q, self.argument, *self.numerator, *self.denominator)

    @property
    def exact(self) -> bool:
        return mode_of(self.base.q, self.argument, *self.numerator, *self.denominator) != FLOAT


def _power_index(a: Scalar, q: Scalar, limit: int, exact: bool) -> int | None:
    """Smallest k in [0, limit] with a q^k == 1, or None."""
    t = a
    for k in range(limit + 1):
        if exact:
            if t == 1:
                return k
        elif abs(t - 1) <= TERMINATION_RTOL:
            return k
        t = t * q
    return None


def termination_index(spec: SeriesSpec) -> int | None:
    """Index n of the last nonzero term when a numerator parameter is q^{-n}."""
    q, exact = spec.base.q, spec.exact
    found = [_power_index(a, q, spec.max_terms, exact) for a in spec.numerator]
    found = [k for k in found if k is not None]
    return min(found) if found else None


def phi_series_bound(spec: SeriesSpec) -> tuple[Scalar, float]:
    """Sum of the series together with a bound on the neglected tail.

    Terminating series are summed in full (bound 0). Terms follow from the
    running ratio t_{k+1}/t_k, which avoids forming large Pochhammer quotients.
    """
    q, z = spec.base.q, spec.argument
    exact = spec.exact
    r, s = len(spec.numerator), len(spec.denominator)
    extra = 1 + s - r
    stop = termination_index(spec)
    if stop is None:
        if not abs(z) < 1:
            raise NonTerminating(f"series does not terminate and |z| = {abs(z)} >= 1")
        last = spec.max_terms - 1
    else:
        last = stop
        for b in spec.denominator:
            j = _power_index(b, q, stop, exact)
            if j is not None and j < stop:
                raise DenominatorPole(f"denominator parameter {b} equals q^-{j} before termination at {stop}")

    zero: Scalar = Fraction(0) if exact else 0
    total: Scalar = zero
    term: Scalar = Fraction(1) if exact else 1.0
    qk: Scalar = Fraction(1) if exact else 1.0
    for k in range(last + 1):
        total = total + term
        if k == last:
            break
        ratio = z / (1 - qk * q)
        for a in spec.numerator:
            ratio = ratio * (1 - a * qk)
        for b in spec.denominator:
            d = 1 - b * qk
            if _is_zero(d):
                raise DenominatorPole(f"denominator parameter {b} hits a zero at k={k}")
            ratio = ratio / d
        if extra:
            ratio = ratio * (-qk) ** extra
        term = term * ratio
        qk = qk * q
        if term == 0:
            break
    if stop is not None:
        return total, 0.0
    # geometric tail estimate from the last computed ratio
    next_term = abs(term * ratio) if last > 0 else abs(term)
    rho = float(abs(ratio)) if last > 0 else float(abs(z))
    bound = float(next_term) / (1 - rho) if rho < 1 else math.inf
    return total, bound


def phi_series(spec: SeriesSpec) -> Scalar:
    """Value of the r-phi-s series described by ``spec``.

    Exact in exact mode for terminating series.
    """
    return phi_series_bound(spec)[0]


def very_well_poised_spec(
    a: Scalar,
    others: Sequence[Scalar],
    base: QBase | Scalar,
    argument: Scalar,
    sqrt_a: Scalar | None = None,
    max_terms: int = 1000,
) -> SeriesSpec:
    """Expand the very-well-poised series W(a; b_1, ..., b_m; q, z) into its phi parameters.

    ``sqrt_a`` defaults to the exact rational root of ``a`` (or the float root).
    """
    qb = base if isinstance(base, QBase) else QBase(base)
    q = qb.q
    if sqrt_a is None:
        sqrt_a = rational_sqrt(a) if mode_of(a, q) != FLOAT else a ** 0.5
    num = [a, q * sqrt_a, -q * sqrt_a, *others]
    den = [sqrt_a, -sqrt_a, *(a * q / b for b in others)]
    return SeriesSpec(tuple(num), tuple(den), qb, argument, max_terms)
