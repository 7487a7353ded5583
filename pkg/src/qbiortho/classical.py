"""Wilson polynomials and Tratnik's multivariable P, Pbar, Q, Qbar families (the q -> 1 targets)."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameters, PoleError
from .quadrature import LineQuadSpec, choose_truncation, line_integrate

_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)
# B_{2k} / (2k (2k - 1)) for k = 1..8
_STIRLING = (
    1 / 12,
    -1 / 360,
    1 / 1260,
    -1 / 1680,
    1 / 1188,
    -691 / 360360,
    1 / 156,
    -3617 / 122400,
)
_STIRLING_MIN_RE = 15.0


def log_gamma_complex(z: complex) -> complex:
    """Principal branch of log Gamma(z).

    Shifts z upward with log Gamma(z) = log Gamma(z + n) - sum_k log(z + k), which
    preserves the principal branch, then applies the Stirling series.
    """
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise PoleError(f"Gamma has a pole at {z.real:g}")
    correction = 0j
    while z.real < _STIRLING_MIN_RE:
        correction += cmath.log(z)
        z += 1
    inv = 1 / z
    inv2 = inv * inv
    series = 0j
    power = inv
    for coeff in _STIRLING:
        series += coeff * power
        power *= inv2
    return (z - 0.5) * cmath.log(z) - z + _LOG_SQRT_2PI + series - correction


def poch(a: complex, n: int) -> complex:
    """Rising factorial (a)_n; switches to log-gamma form for |a| > 1e3."""
    if abs(a) > 1e3:
        return cmath.exp(log_gamma_complex(a + n) - log_gamma_complex(a))
    result = 1
    for k in range(n):
        result *= a + k
    return result


def _hyper_unit(numerator: Sequence, denominator: Sequence, n: int):
    """Terminating sum_{k=0}^{n} prod (a)_k / (prod (b)_k k!) at unit argument, by running ratio."""
    total = 1
    term = 1
    for k in range(n):
        ratio = 1
        for a in numerator:
            ratio = ratio * (a + k)
        for b in denominator:
            ratio = ratio / (b + k)
        term = term * ratio / (k + 1)
        total = total + term
    return total


@dataclass(frozen=True)
class WilsonParams:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        vals = (self.a, self.b, self.c, self.d)
        if any(isinstance(v, complex) for v in vals):
            raise InvalidParameters("only real Wilson parameters are supported")
        for x, y in itertools.combinations(vals, 2):
            if x + y <= 0:
                raise InvalidParameters("pairwise sums of Wilson parameters must be positive")

    @property
    def total(self) -> float:
        return self.a + self.b + self.c + self.d


def wilson_poly(n: int, x, params: WilsonParams):
    """P_n(x) = (a+b)_n (a+c)_n (a+d)_n 4F3(-n, n+a+b+c+d-1, a-ix, a+ix; a+b, a+c, a+d; 1)."""
    if n < 0:
        raise InvalidParameters("degree must be nonnegative")
    a, b, c, d = params.a, params.b, params.c, params.d
    ix = 1j * np.asarray(x) if isinstance(x, np.ndarray) else 1j * x
    value = poch(a + b, n) * poch(a + c, n) * poch(a + d, n) * _hyper_unit(
        (-n, n + params.total - 1, a - ix, a + ix), (a + b, a + c, a + d), n
    )
    return np.real(value) if isinstance(value, np.ndarray) else value.real


def wilson_poly_whipple(n: int, x, params: WilsonParams, sign: int = 1):
    """P_n(x) through one of the two Whipple-transformed 4F3 forms (sign=+1 uses c - ix)."""
    a, b, c, d = params.a, params.b, params.c, params.d
    s = -sign
    ix = 1j * x
    value = poch(a + b, n) * poch(c + s * ix, n) * poch(d + s * ix, n) * _hyper_unit(
        (-n, 1 - c - d - n, a - s * ix, b - s * ix), (a + b, 1 - c - n - s * ix, 1 - d - n - s * ix), n
    )
    return value.real


def _inv_abs_gamma_2ix_sq(x: float) -> float:
    # 1/|Gamma(2ix)|^2 = 2x sinh(2 pi x) / pi
    return 2 * x * math.sinh(2 * math.pi * x) / math.pi


def log_wilson_weight(x: float, params: WilsonParams) -> float:
    """log w(x); -inf at x = 0 where the weight vanishes."""
    x = abs(float(x))
    if x == 0:
        return -math.inf
    t = 2 * math.pi * x
    log_sinh = t + math.log1p(-math.exp(-2 * t)) - math.log(2)
    log_inv = math.log(2 * x) + log_sinh - math.log(math.pi)
    s = sum(log_gamma_complex(v + 1j * x).real for v in (params.a, params.b, params.c, params.d))
    return 2 * s + log_inv


def wilson_weight(x: float, params: WilsonParams) -> float:
    """w(x) = |Gamma(a+ix) Gamma(b+ix) Gamma(c+ix) Gamma(d+ix) / Gamma(2ix)|^2 (zero at x = 0)."""
    lw = log_wilson_weight(x, params)
    return 0.0 if lw == -math.inf else math.exp(lw)


def wilson_norm(n: int, params: WilsonParams) -> float:
    """h_n, the squared norm of P_n against w on the real line."""
    a, b, c, d = params.a, params.b, params.c, params.d
    s = params.total
    rising = poch(n + s - 1, n).real
    if rising <= 0:
        raise InvalidParameters("norm is not positive for these parameters")
    log_h = math.log(4 * math.pi) + math.lgamma(n + 1) + math.log(rising)
    for pair in (a + b, a + c, a + d, b + c, b + d, c + d):
        log_h += math.lgamma(n + pair)
    log_h -= math.lgamma(2 * n + s)
    return math.exp(log_h)


def wilson_truncation(params: WilsonParams, ratio: float = 1e-30) -> float:
    """Cut-off X* with w(X*) below ``ratio`` times the peak of w."""
    return choose_truncation(lambda x: wilson_weight(x, params), ratio=ratio, step=1.0)


def wilson_inner_product(n: int, m: int, params: WilsonParams, rel_tol: float = 1e-10,
                         truncation: float | None = None) -> tuple[float, float]:
    """Real-line integral of P_n P_m w, with its error estimate."""
    def f(x: float) -> float:
        return wilson_poly(n, x, params) * wilson_poly(m, x, params) * wilson_weight(x, params)

    if truncation is None:
        # cut where the full integrand, not just w, has decayed
        truncation = choose_truncation(f, ratio=1e-30, step=1.0)
    return line_integrate(LineQuadSpec(f, truncation, rel_tol, even=True))


# Tratnik's multivariable families


@dataclass(frozen=True)
class TratnikParams:
    a: tuple[float, ...]
    b: tuple[float, ...]
    c: float
    d: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        if len(self.a) != len(self.b) or not self.a:
            raise InvalidParameters("a and b must be nonempty and of equal length")
        A, B = self.A, self.B
        if min(A, B, A + self.c, A + self.d, B + self.c, B + self.d) <= 0:
            raise InvalidParameters("A, B, A+c, A+d, B+c, B+d must be positive")

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def A(self) -> float:
        return sum(self.a)

    @property
    def B(self) -> float:
        return sum(self.b)


def _indices(n: Sequence[int]):
    return itertools.product(*(range(k + 1) for k in n))


def _check_multi(n: Sequence[int], params: TratnikParams) -> tuple[int, ...]:
    n = tuple(int(k) for k in n)
    if len(n) != params.p or min(n) < 0:
        raise InvalidParameters(f"degree vector must have {params.p} nonnegative entries")
    return n


def _tratnik(n, x, params, pre, J_num, J_den, side):
    """Shared p-fold sum: pre * sum_j num_J(J)/den_J(J) * prod_k (-n_k)_j (e_k)_j / ((a_k+b_k)_j j!)."""
    total = 0j
    for j in _indices(n):
        J = sum(j)
        term = complex(1)
        for v in J_num:
            term *= poch(v, J)
        for v in J_den:
            term /= poch(v, J)
        for k, jk in enumerate(j):
            if side == "a":
                e = params.a[k] + 1j * x[k]
            else:
                e = params.b[k] - 1j * x[k]
            term *= poch(-n[k], jk) * poch(e, jk) / (poch(params.a[k] + params.b[k], jk) * math.factorial(jk))
        total += term
    return pre * total


def _ab_prefactor(n, params):
    out = 1
    for k, nk in enumerate(n):
        out *= poch(params.a[k] + params.b[k], nk)
    return out


def tratnik_P(n: Sequence[int], x: Sequence[float], params: TratnikParams) -> complex:
    n = _check_multi(n, params)
    N, X, A, B, c, d = sum(n), sum(x), params.A, params.B, params.c, params.d
    pre = poch(A + c, N) * poch(A + d, N) * _ab_prefactor(n, params)
    return _tratnik(n, x, params, pre, (N + A + B + c + d - 1, A - 1j * X), (A + c, A + d), "a")


def tratnik_Pbar(n: Sequence[int], x: Sequence[float], params: TratnikParams) -> complex:
    n = _check_multi(n, params)
    N, X, A, B, c, d = sum(n), sum(x), params.A, params.B, params.c, params.d
    pre = poch(B + c, N) * poch(B + d, N) * _ab_prefactor(n, params)
    return _tratnik(n, x, params, pre, (N + A + B + c + d - 1, B + 1j * X), (B + c, B + d), "b")


def tratnik_Q(n: Sequence[int], x: Sequence[float], params: TratnikParams) -> complex:
    n = _check_multi(n, params)
    N, X, B, c, d = sum(n), sum(x), params.B, params.c, params.d
    iX = 1j * X
    pre = poch(c - iX, N) * poch(d - iX, N) * _ab_prefactor(n, params)
    return _tratnik(n, x, params, pre, (1 - c - d - N, B + iX), (1 - c - N + iX, 1 - d - N + iX), "a")


def tratnik_Qbar(n: Sequence[int], x: Sequence[float], params: TratnikParams) -> complex:
    n = _check_multi(n, params)
    N, X, A, c, d = sum(n), sum(x), params.A, params.c, params.d
    iX = 1j * X
    pre = poch(c + iX, N) * poch(d + iX, N) * _ab_prefactor(n, params)
    return _tratnik(n, x, params, pre, (1 - c - d - N, A - iX), (1 - c - N - iX, 1 - d - N - iX), "b")


def tratnik_weight(x: Sequence[float], params: TratnikParams) -> complex:
    """Multivariable weight with Gamma(a_k + i x_k) Gamma(b_k - i x_k) factors."""
    X = sum(x)
    A, B, c, d = params.A, params.B, params.c, params.d
    if X == 0:
        return 0j
    log_w = log_gamma_complex(A - 1j * X) + log_gamma_complex(B + 1j * X)
    log_w += 2 * (log_gamma_complex(c + 1j * X).real + log_gamma_complex(d + 1j * X).real)
    log_w += math.log(abs(_inv_abs_gamma_2ix_sq(X)))
    for ak, bk, xk in zip(params.a, params.b, x):
        log_w += log_gamma_complex(ak + 1j * xk) + log_gamma_complex(bk - 1j * xk)
    return cmath.exp(log_w)
