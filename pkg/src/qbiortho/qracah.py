"""Bivariate q-Racah type biorthogonal system on the triangle x + y <= N.

``racah_F``/``racah_G`` are the defining double series, ``racah_F_alt``/
``racah_G_alt`` the transformed double series that make the biorthogonality
sums tractable. All evaluators are exact for Fraction parameters.

Symbol names: ``alpha``, ``gamma``, ``gamma_p`` (gamma prime) and ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .errors import DomainError, InvalidParameters, PoleError
from .qcore import EXACT, QBase, Scalar, mode_of, qpochhammer, to_exact


@dataclass(frozen=True)
class RacahParams:
    N: int
    alpha: Scalar
    gamma: Scalar
    gamma_p: Scalar
    c: Scalar
    q: Scalar

    def __post_init__(self) -> None:
        if self.N < 0:
            raise InvalidParameters("N must be nonnegative")
        values = (self.alpha, self.gamma, self.gamma_p, self.c, self.q)
        mode = mode_of(*values)
        if mode != "float":
            for name in ("alpha", "gamma", "gamma_p", "c", "q"):
                object.__setattr__(self, name, to_exact(getattr(self, name)))
        QBase(self.q)
        for name in ("alpha", "gamma", "gamma_p", "c"):
            if getattr(self, name) == 0:
                raise InvalidParameters(f"{name} must be nonzero")

    @property
    def exact(self) -> bool:
        return mode_of(self.alpha, self.gamma, self.gamma_p, self.c, self.q) != "float"

    def with_N(self, N: int) -> "RacahParams":
        return RacahParams(N, self.alpha, self.gamma, self.gamma_p, self.c, self.q)

    def as_dict(self) -> dict[str, str]:
        return {k: str(getattr(self, k)) for k in ("N", "alpha", "gamma", "gamma_p", "c", "q")}


DEFAULT_PARAMS = RacahParams(
    N=3,
    alpha=Fraction(1, 3),
    gamma=Fraction(1, 5),
    gamma_p=Fraction(1, 7),
    c=Fraction(3, 2),
    q=Fraction(1, 2),
)


class _Ratio:
    """Running product of q-shifted factorials split into numerator and denominator.

    With ``violations`` set, vanishing denominators and negative-index poles are
    recorded instead of raised.
    """

    __slots__ = ("q", "num", "den", "where", "violations", "bad")

    def __init__(self, q: Scalar, where: str = "", violations: list[str] | None = None):
        self.q = q
        one = Fraction(1) if isinstance(q, Fraction) else 1.0
        self.num: Scalar = one
        self.den: Scalar = one
        self.where = where
        self.violations = violations
        self.bad = False

    def _fail(self, label: str, detail: str) -> None:
        message = f"{self.where}: {label} {detail}"
        if self.violations is None:
            raise PoleError(message)
        self.violations.append(message)
        self.bad = True

    def up(self, label: str, z: Scalar, k: int = 1) -> "_Ratio":
        try:
            self.num = self.num * qpochhammer(z, self.q, k)
        except PoleError:
            self._fail(label, f"has a pole at index {k}")
        return self

    def down(self, label: str, z: Scalar, k: int = 1) -> "_Ratio":
        try:
            d = qpochhammer(z, self.q, k)
        except PoleError:
            self._fail(label, f"has a pole at index {k}")
            return self
        if d == 0:
            self._fail(label, f"vanishes at index {k}")
        else:
            self.den = self.den * d
        return self

    def times(self, x: Scalar) -> "_Ratio":
        self.num = self.num * x
        return self

    def value(self) -> Scalar:
        if self.bad:
            return None
        return self.num / self.den


def _check_point(params: RacahParams, x: int, y: int) -> None:
    if not (0 <= x <= params.N and 0 <= y <= params.N):
        raise DomainError(f"grid point ({x}, {y}) outside [0, {params.N}]^2")


def _weight_ratio(params: RacahParams, x: int, y: int, violations=None) -> _Ratio:
    N, a, g, gp, c, q = params.N, params.alpha, params.gamma, params.gamma_p, params.c, params.q
    ggp = g * gp
    r = _Ratio(q, f"weight(x={x}, y={y})", violations)
    r.up("(alpha q/gamma gamma')_N", a * q / ggp, N)
    r.up("(gamma'/c)_N", gp / c, N)
    r.up("(alpha c q/gamma')_N", a * c * q / gp, N)
    r.down("(alpha q)_N", a * q, N)
    r.down("(1/c)_N", 1 / c, N)
    r.down("(alpha c q/gamma gamma')_N", a * c * q / ggp, N)
    r.up("1 - gamma gamma' q^(2x-N-1)/alpha c", ggp * q ** (2 * x - N - 1) / (a * c), 1)
    r.up("1 - c q^(2y-N)", c * q ** (2 * y - N), 1)
    r.up("(gamma gamma' q^(-N-1)/alpha c)_x", ggp * q ** (-N - 1) / (a * c), x)
    r.up("(gamma)_x", g, x)
    r.up("(c q^-N)_y", c * q ** (-N), y)
    r.up("(gamma')_y", gp, y)
    r.down("1 - gamma gamma' q^(-N-1)/alpha c", ggp * q ** (-N - 1) / (a * c), 1)
    r.down("1 - c q^-N", c * q ** (-N), 1)
    r.down("(q)_x", q, x)
    r.down("(gamma' q^-N/alpha c)_x", gp * q ** (-N) / (a * c), x)
    r.down("(q)_y", q, y)
    r.down("(c q^(1-N)/gamma')_y", c * q ** (1 - N) / gp, y)
    r.up("(1/c)_(x-y)", 1 / c, x - y)
    r.up("(q^-N)_(x+y)", q ** (-N), x + y)
    r.down("(gamma gamma'/alpha c)_(x-y)", ggp / (a * c), x - y)
    r.down("(gamma gamma' q^-N/alpha)_(x+y)", ggp * q ** (-N) / a, x + y)
    r.times(a ** (-x) * gp ** (x - y))
    return r


def racah_weight(x: int, y: int, params: RacahParams) -> Scalar:
    """w_N(x, y); zero above the anti-diagonal x + y > N."""
    _check_point(params, x, y)
    if x + y > params.N:
        return Fraction(0) if params.exact else 0.0
    return _weight_ratio(params, x, y).value()


def _F_terms(params, m, n, x, y, violations=None) -> Iterator[_Ratio]:
    N, a, g, gp, c, q = params.N, params.alpha, params.gamma, params.gamma_p, params.c, params.q
    ggp = g * gp
    where = f"F[{m},{n}](x={x}, y={y})"
    pre = _Ratio(q, where, violations)
    pre.up("(alpha q^(N+1-x-y)/gamma gamma')_(m+n)", a * q ** (N + 1 - x - y) / ggp, m + n)
    pre.up("(q^(x-y)/c)_n", q ** (x - y) / c, n)
    pre.up("(alpha c q^(1+y-x)/gamma gamma')_m", a * c * q ** (1 + y - x) / ggp, m)
    pre.down("(q^-N)_(m+n)", q ** (-N), m + n)
    pre.down("(alpha c q/gamma gamma')_n", a * c * q / ggp, n)
    pre.down("(1/c)_m", 1 / c, m)
    # printed as q^(mx+ny); the extra q^(mn) matches the transformed series and the norm
    pre.times(c ** (n - m) * q ** (m * x + n * y + m * n))
    yield pre
    for i in range(m + 1):
        for j in range(n + 1):
            t = _Ratio(q, f"{where}[i={i}, j={j}]", violations)
            t.up("(q^-m)_i", q ** (-m), i)
            t.up("(gamma q^x)_i", g * q ** x, i)
            t.up("(gamma gamma' q^(x-N-1)/alpha c)_i", ggp * q ** (x - N - 1) / (a * c), i)
            t.up("(q^-n)_j", q ** (-n), j)
            t.up("(gamma' q^y)_j", gp * q ** y, j)
            t.up("(c q^(y-N))_j", c * q ** (y - N), j)
            # printed with an undefined M; m is the reading consistent with the transformed form
            t.up("(gamma gamma' q^(-m-n)/alpha)_(i+j)", ggp * q ** (-m - n) / a, i + j)
            t.down("(q)_i", q, i)
            t.down("(gamma)_i", g, i)
            t.down("(gamma gamma' q^(x-y-m)/alpha c)_i", ggp * q ** (x - y - m) / (a * c), i)
            t.down("(q)_j", q, j)
            t.down("(gamma')_j", gp, j)
            t.down("(c q^(1+y-x-n))_j", c * q ** (1 + y - x - n), j)
            t.down("(gamma gamma' q^(x+y-N-m-n)/alpha)_(i+j)", ggp * q ** (x + y - N - m - n) / a, i + j)
            t.times(q ** (i + j))
            yield t


def _F_alt_terms(params, m, n, x, y, violations=None) -> Iterator[_Ratio]:
    N, a, g, gp, c, q = params.N, params.alpha, params.gamma, params.gamma_p, params.c, params.q
    ggp = g * gp
    where = f"F_alt[{m},{n}](x={x}, y={y})"
    pre = _Ratio(q, where, violations)
    pre.up("(gamma gamma' q^-N/alpha)_(x+y)", ggp * q ** (-N) / a, x + y)
    pre.up("(gamma gamma'/alpha c)_(x-y)", ggp / (a * c), x - y)
    pre.down("(q^-N)_(x+y)", q ** (-N), x + y)
    pre.down("(1/c)_(x-y)", 1 / c, x - y)
    pre.times((a / ggp) ** x * (a * q ** (N + n + 1) / ggp) ** m * q ** (N * n))
    yield pre
    for j in range(x + 1):
        for k in range(y + 1):
            t = _Ratio(q, f"{where}[j={j}, k={k}]", violations)
            t.up("(gamma gamma' q^(-m-n)/alpha)_(j+k)", ggp * q ** (-m - n) / a, j + k)
            t.up("(q^-x)_j", q ** (-x), j)
            t.up("(gamma gamma' q^(x-N-1)/alpha c)_j", ggp * q ** (x - N - 1) / (a * c), j)
            t.up("(gamma q^m)_j", g * q ** m, j)
            t.down("(gamma gamma' q^-N/alpha)_(j+k)", ggp * q ** (-N) / a, j + k)
            t.down("(q)_j", q, j)
            t.down("(gamma)_j", g, j)
            t.down("(gamma gamma' q^-n/alpha c)_j", ggp * q ** (-n) / (a * c), j)
            t.up("(q^-y)_k", q ** (-y), k)
            t.up("(c q^(y-N))_k", c * q ** (y - N), k)
            t.up("(gamma' q^n)_k", gp * q ** n, k)
            t.down("(q)_k", q, k)
            t.down("(c q^(1-m))_k", c * q ** (1 - m), k)
            t.down("(gamma')_k", gp, k)
            t.times(q ** (j + k))
            yield t


def _G_terms(params, m, n, x, y, violations=None) -> Iterator[_Ratio]:
    N, a, g, gp, c, q = params.N, params.alpha, params.gamma, params.gamma_p, params.c, params.q
    ggp = g * gp
    where = f"G[{m},{n}](x={x}, y={y})"
    yield _Ratio(q, where, violations)
    for i in range(m + 1):
        for j in range(n + 1):
            t = _Ratio(q, f"{where}[i={i}, j={j}]", violations)
            t.up("(q^-m)_i", q ** (-m), i)
            t.up("(q^-x)_i", q ** (-x), i)
            t.up("(gamma gamma' q^(x-N-1)/alpha c)_i", ggp * q ** (x - N - 1) / (a * c), i)
            t.up("(q^-n)_j", q ** (-n), j)
            t.up("(q^-y)_j", q ** (-y), j)
            t.up("(c q^(y-N))_j", c * q ** (y - N), j)
            t.up("(alpha q^(m+n))_(i+j)", a * q ** (m + n), i + j)
            t.down("(q)_i", q, i)
            t.down("(gamma)_i", g, i)
            t.down("(gamma' q^n/c)_i", gp * q ** n / c, i)
            t.down("(q)_j", q, j)
            t.down("(gamma')_j", gp, j)
            t.down("(alpha c q^(m+1)/gamma')_j", a * c * q ** (m + 1) / gp, j)
            t.down("(q^-N)_(i+j)", q ** (-N), i + j)
            t.times(q ** (i + j))
            yield t


def _G_alt_terms(params, m, n, x, y, violations=None) -> Iterator[_Ratio]:
    N, a, g, gp, c, q = params.N, params.alpha, params.gamma, params.gamma_p, params.c, params.q
    where = f"G_alt[{m},{n}](x={x}, y={y})"
    pre = _Ratio(q, where, violations)
    pre.up("(alpha q^(N+1))_(m+n)", a * q ** (N + 1), m + n)
    pre.up("(alpha c q/gamma')_m", a * c * q / gp, m)
    pre.up("(gamma'/c)_n", gp / c, n)
    pre.down("(q^-N)_(m+n)", q ** (-N), m + n)
    pre.down("(gamma'/c)_m", gp / c, m)
    # printed with index m; n is the index that reproduces the defining series
    pre.down("(alpha c q/gamma')_n", a * c * q / gp, n)
    pre.times((gp * q ** (-N - 1) / (a * c)) ** m * (c * q ** (-N) / gp) ** n)
    yield pre
    for j in range(m + 1):
        for k in range(n + 1):
            t = _Ratio(q, f"{where}[j={j}, k={k}]", violations)
            t.up("(alpha q^(m+n))_(j+k)", a * q ** (m + n), j + k)
            t.up("(q^-m)_j", q ** (-m), j)
            t.up("(gamma q^x)_j", g * q ** x, j)
            t.up("(alpha c q^(N-x+1)/gamma')_j", a * c * q ** (N - x + 1) / gp, j)
            t.down("(alpha q^(N+1))_(j+k)", a * q ** (N + 1), j + k)
            t.down("(q)_j", q, j)
            t.down("(gamma)_j", g, j)
            t.down("(alpha c q^(n+1)/gamma')_j", a * c * q ** (n + 1) / gp, j)
            t.up("(q^-n)_k", q ** (-n), k)
            t.up("(gamma' q^y)_k", gp * q ** y, k)
            t.up("(gamma' q^(N-y)/c)_k", gp * q ** (N - y) / c, k)
            t.down("(q)_k", q, k)
            t.down("(gamma')_k", gp, k)
            t.down("(gamma' q^m/c)_k", gp * q ** m / c, k)
            t.times(q ** (j + k))
            yield t


def _sum_series(terms: Iterator[_Ratio]) -> Scalar:
    """First yielded ratio is the prefactor, the rest are summands."""
    first = next(terms)
    prefactor = first.value()
    total: Scalar = prefactor * 0
    for t in terms:
        total = total + t.value()
    return prefactor * total


def _check_degrees(m: int, n: int) -> None:
    if m < 0 or n < 0:
        raise DomainError(f"degrees must be nonnegative, got ({m}, {n})")


def racah_F(m: int, n: int, x: int, y: int, params: RacahParams) -> Scalar:
    """F_{m,n}(x, y) from its defining double series."""
    _check_degrees(m, n)
    _check_point(params, x, y)
    return _sum_series(_F_terms(params, m, n, x, y))


def racah_F_alt(m: int, n: int, x: int, y: int, params: RacahParams) -> Scalar:
    """F_{m,n}(x, y) from the transformed series (sums over j <= x, k <= y).

    Its prefactor divides by (q^-N; q)_{x+y}, so only x + y <= N is accepted.
    """
    _check_degrees(m, n)
    _check_point(params, x, y)
    if x + y > params.N:
        raise DomainError("the transformed F is only defined on x + y <= N")
    return _sum_series(_F_alt_terms(params, m, n, x, y))


def racah_G(m: int, n: int, x: int, y: int, params: RacahParams) -> Scalar:
    """G_{m,n}(x, y) from its defining double series; m + n > N is accepted but unproven."""
    _check_degrees(m, n)
    _check_point(params, x, y)
    return _sum_series(_G_terms(params, m, n, x, y))


def racah_G_alt(m: int, n: int, x: int, y: int, params: RacahParams) -> Scalar:
    _check_degrees(m, n)
    _check_point(params, x, y)
    if m + n > params.N:
        raise DomainError(f"transformed G requires m + n <= N, got m + n = {m + n} > {params.N}")
    return _sum_series(_G_alt_terms(params, m, n, x, y))


def racah_norm(m: int, n: int, params: RacahParams) -> Scalar:
    """nu_{m,n}, the diagonal value of the biorthogonality sum."""
    _check_degrees(m, n)
    return _norm_ratio(params, m, n).value()


def _norm_ratio(params: RacahParams, m: int, n: int, violations=None) -> _Ratio:
    N, a, g, gp, c, q = params.N, params.alpha, params.gamma, params.gamma_p, params.c, params.q
    r = _Ratio(q, f"nu[{m},{n}]", violations)
    r.up("1 - alpha", a, 1)
    r.down("1 - alpha q^(2m+2n)", a * q ** (2 * m + 2 * n), 1)
    r.up("(q)_m", q, m)
    r.up("(alpha c q/gamma')_m", a * c * q / gp, m)
    r.up("(q)_n", q, n)
    r.up("(gamma'/c)_n", gp / c, n)
    r.up("(alpha q/gamma gamma')_(m+n)", a * q / (g * gp), m + n)
    r.up("(alpha q^(N+1))_(m+n)", a * q ** (N + 1), m + n)
    r.down("(gamma)_m", g, m)
    r.down("(1/c)_m", 1 / c, m)
    r.down("(gamma')_n", gp, n)
    r.down("(alpha c q/gamma gamma')_n", a * c * q / (g * gp), n)
    r.down("(alpha)_(m+n)", a, m + n)
    r.down("(q^-N)_(m+n)", q ** (-N), m + n)
    r.times(c ** (n - m) * q ** (m * n))
    return r


def degree_pairs(N: int) -> list[tuple[int, int]]:
    """All (m, n) with m, n >= 0 and m + n <= N, in lexicographic order."""
    return [(m, n) for m in range(N + 1) for n in range(N + 1 - m)]


def support(N: int) -> list[tuple[int, int]]:
    """Grid points with x + y <= N, where the weight can be nonzero."""
    return [(x, y) for x in range(N + 1) for y in range(N + 1 - x)]


def validate_params(params: RacahParams) -> list[str]:
    """Scan every denominator factor of the weight, the four series and the norm.

    Points range over the support x + y <= N and degrees over m + n <= N; an
    empty list means every evaluation used by the biorthogonality check is
    pole-free.
    """
    violations: list[str] = []
    N = params.N
    for m, n in degree_pairs(N):
        _norm_ratio(params, m, n, violations)
    for x, y in support(N):
        _weight_ratio(params, x, y, violations)
        for m, n in degree_pairs(N):
            for builder in (_F_terms, _F_alt_terms, _G_terms, _G_alt_terms):
                for _ in builder(params, m, n, x, y, violations):
                    pass
    # keep the first report of each distinct factor/location pair, in scan order
    return list(dict.fromkeys(violations))


class _Tables:
    """Memoised F, G and weight values over the support for one parameter set."""

    def __init__(self, params: RacahParams):
        self.params = params
        self.points = support(params.N)
        self.weights = {pt: racah_weight(*pt, params) for pt in self.points}
        self._F: dict = {}
        self._G: dict = {}

    def F(self, m: int, n: int) -> dict:
        key = (m, n)
        if key not in self._F:
            self._F[key] = {pt: racah_F(m, n, *pt, self.params) for pt in self.points}
        return self._F[key]

    def G(self, m: int, n: int) -> dict:
        key = (m, n)
        if key not in self._G:
            self._G[key] = {pt: racah_G(m, n, *pt, self.params) for pt in self.points}
        return self._G[key]


@lru_cache(maxsize=8)
def _tables(params: RacahParams) -> _Tables:
    return _Tables(params)


def inner_product(m: int, n: int, m2: int, n2: int, params: RacahParams) -> Scalar:
    """sum_{x,y} w_N(x, y) F_{m,n}(x, y) G_{m2,n2}(x, y), skipping x + y > N.

    Rows are accumulated in a fixed order, so the exact result does not depend
    on evaluation order.
    """
    for mm, nn in ((m, n), (m2, n2)):
        _check_degrees(mm, nn)
        if mm + nn > params.N:
            raise DomainError(f"degree pair ({mm}, {nn}) has m + n > N = {params.N}")
    tables = _tables(params)
    F, G = tables.F(m, n), tables.G(m2, n2)
    total: Scalar = Fraction(0) if params.exact else 0.0
    for pt in tables.points:
        total = total + tables.weights[pt] * F[pt] * G[pt]
    return total


def weight_sum(params: RacahParams) -> Scalar:
    """Total mass of the weight over the full (N+1) x (N+1) grid."""
    total: Scalar = Fraction(0) if params.exact else 0.0
    for x in range(params.N + 1):
        for y in range(params.N + 1):
            total = total + racah_weight(x, y, params)
    return total
