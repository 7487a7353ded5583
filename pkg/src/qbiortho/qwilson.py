"""Continuous multivariable q-family on the p-torus.

Angles are theta_k with e^{i theta_k} = q^{i x_k}. Evaluators accept either a
:class:`TorusPoint` or any array-like of shape (p, ...) so the same code serves
single points and whole quadrature lattices.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GridTooCoarse, InvalidParameters
from .qcore import DEFAULT_TOL, h_factor, qpochhammer, qpochhammer_inf, qpochhammer_inf_multi
from .quadrature import TorusGridSpec, torus_integrate
from .report import VerificationReport, format_value

MAX_VERIFY_DIM = 3
DEFAULT_GRID = {1: 256, 2: 128, 3: 64}


def _prod(values) -> complex:
    out = 1
    for v in values:
        out = out * v
    return out


@dataclass(frozen=True)
class ContinuousParams:
    a: tuple
    b: tuple
    c: complex
    d: complex
    beta: complex
    q: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        if not self.a or len(self.a) != len(self.b):
            raise InvalidParameters("a and b must be nonempty and of equal length")
        if not 0 < abs(self.q) < 1:
            raise InvalidParameters("base must satisfy 0 < |q| < 1")
        if max(abs(v) for v in (*self.a, *self.b)) >= 1:
            raise InvalidParameters("all |a_k|, |b_k| must be < 1")
        if abs(self.c) >= 1 or abs(self.d) >= 1:
            raise InvalidParameters("|c| and |d| must be < 1")
        if self.beta == 0:
            raise InvalidParameters("beta must be nonzero")
        # the beta chain and the a-power denominators only exist for p > 1
        if len(self.a) > 1 and any(v == 0 for v in (*self.a, *self.b)):
            raise InvalidParameters("a_k and b_k must be nonzero when p > 1")
        # beta = q^{+-n} makes a theta-function factor vanish identically
        logq = math.log(abs(self.q))
        ratio = math.log(abs(self.beta)) / logq
        k = round(ratio)
        if abs(ratio - k) < 1e-12 and abs(self.beta - self.q ** k) <= 1e-12 * abs(self.beta):
            raise InvalidParameters(f"beta must avoid integer powers of q, got q^{k}")
        chain = [self.beta]
        for k in range(self.p - 1):
            chain.append(chain[-1] / (self.a[k] * self.b[k + 1]))
        object.__setattr__(self, "betas", tuple(chain))

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def A(self) -> complex:
        return _prod(self.a)

    @property
    def B(self) -> complex:
        return _prod(self.b)

    def A_tail(self, j: int) -> complex:
        """prod_{k >= j} a_k with 0-based j (j = p gives 1)."""
        return _prod(self.a[j:])

    def B_tail(self, j: int) -> complex:
        return _prod(self.b[j:])

    def with_beta(self, beta: complex) -> "ContinuousParams":
        return ContinuousParams(self.a, self.b, self.c, self.d, beta, self.q)

    def as_dict(self) -> dict[str, str]:
        return {
            "a": ",".join(repr(v) for v in self.a),
            "b": ",".join(repr(v) for v in self.b),
            "c": repr(self.c),
            "d": repr(self.d),
            "beta": repr(self.beta),
            "q": repr(self.q),
        }


@dataclass(frozen=True)
class TorusPoint:
    theta: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", tuple(self.theta))
        for t in self.theta:
            if np.any(np.abs(t) > math.pi + 1e-12):
                raise InvalidParameters("angles must lie in [-pi, pi]")

    @property
    def Theta(self):
        return sum(self.theta)


def _angles(point, p: int) -> list:
    theta = point.theta if isinstance(point, TorusPoint) else point
    theta = [np.asarray(t, dtype=float) if isinstance(t, np.ndarray) else t for t in theta]
    if len(theta) != p:
        raise InvalidParameters(f"expected {p} angles, got {len(theta)}")
    return theta


def _tails(theta: list) -> list:
    """Theta_j = sum_{k >= j} theta_k for j = 0..p (0-based; the last entry is 0)."""
    tails = [0.0] * (len(theta) + 1)
    for j in range(len(theta) - 1, -1, -1):
        tails[j] = tails[j + 1] + theta[j]
    return tails


def _expi(t):
    return np.exp(1j * t) if isinstance(t, np.ndarray) else complex(math.cos(t), math.sin(t))


def _check_index(n: Sequence[int], p: int) -> tuple[int, ...]:
    n = tuple(int(k) for k in n)
    if len(n) != p or min(n) < 0:
        raise InvalidParameters(f"degree vector must have {p} nonnegative entries")
    return n


def weight_q(point, params: ContinuousParams, tol: float = DEFAULT_TOL):
    """The multivariable weight, including its (2 pi)^{-p} prefactor."""
    q, p = params.q, params.p
    theta = _angles(point, p)
    Theta = _tails(theta)[0]
    E = _expi(Theta)
    A, B, c, d, beta = params.A, params.B, params.c, params.d, params.beta
    num = qpochhammer_inf(E * E, q, tol) * qpochhammer_inf(1 / (E * E), q, tol)
    den = qpochhammer_inf(A / E, q, tol) * qpochhammer_inf(B * E, q, tol)
    den = den * h_factor(Theta, (c, d), q, tol)
    # beta b_1 / B written as beta / (b_2 ... b_p) so p = 1 needs no division by b_1
    r = beta / params.B_tail(1)
    den = den * qpochhammer_inf(r * E, q, tol) * qpochhammer_inf(q / (r * E), q, tol)
    value = num / den
    for k in range(p):
        e = _expi(theta[k])
        bk = params.betas[k]
        value = value * qpochhammer_inf(bk * e, q, tol) * qpochhammer_inf(q / (bk * e), q, tol)
        value = value / (qpochhammer_inf(params.a[k] * e, q, tol) * qpochhammer_inf(params.b[k] / e, q, tol))
    return value / (2 * math.pi) ** p


def total_weight_closed(params: ContinuousParams, tol: float = DEFAULT_TOL) -> complex:
    """Closed form of the torus integral of :func:`weight_q`."""
    q, A, B, c, d = params.q, params.A, params.B, params.c, params.d
    num = 2 * qpochhammer_inf(A * B * c * d, q, tol)
    for k in range(1, params.p):
        t = params.b[k] * params.betas[k]
        num = num * qpochhammer_inf(t, q, tol) * qpochhammer_inf(q / t, q, tol)
    den = qpochhammer_inf(q, q, tol) ** params.p
    den = den * qpochhammer_inf_multi((A * c, A * d, B * c, B * d, c * d), q, tol)
    den = den * qpochhammer_inf_multi([ak * bk for ak, bk in zip(params.a, params.b)], q, tol)
    return num / den


def qP(n: Sequence[int], point, params: ContinuousParams):
    """P_n(x; q), a Laurent polynomial in e^{i theta_1}, ..., e^{i theta_p}."""
    p, q = params.p, params.q
    n = _check_index(n, p)
    theta = _angles(point, p)
    Theta = _tails(theta)
    N = sum(n)
    Ntail = [sum(n[j:]) for j in range(p + 1)]
    A, B, c, d = params.A, params.B, params.c, params.d
    X = A * B * c * d
    ab = [ak * bk for ak, bk in zip(params.a, params.b)]
    e = [_expi(t) for t in theta]
    eT = [_expi(t) for t in Theta]
    pre = qpochhammer(A * c, q, N) * qpochhammer(A * d, q, N) * _prod(qpochhammer(ab[k], q, n[k]) for k in range(p))
    total = 0
    for j in itertools.product(*(range(k + 1) for k in n)):
        J = sum(j)
        term = qpochhammer(X * q ** (N - 1), q, J) * qpochhammer(A / eT[0], q, J)
        term = term / (qpochhammer(A * c, q, J) * qpochhammer(A * d, q, J)) * q ** J
        for k in range(p):
            term = term * qpochhammer(q ** (-n[k]), q, j[k]) * qpochhammer(params.a[k] * e[k], q, j[k])
            term = term / (qpochhammer(q, q, j[k]) * qpochhammer(ab[k], q, j[k]))
        # j_k pairs with the tail Theta_{k+1}, B_{k+1} and N_{k+1} for k < p
        for k in range(p - 1):
            if j[k]:
                term = term * (eT[k + 1] / params.B_tail(k + 1)) ** j[k] * q ** (-Ntail[k + 1] * j[k])
        total = total + term
    return pre * total


def qPbar(m: Sequence[int], point, params: ContinuousParams):
    """Pbar_m(x; q), the partner family of :func:`qP`."""
    p, q = params.p, params.q
    m = _check_index(m, p)
    theta = _angles(point, p)
    Theta = _tails(theta)
    M = sum(m)
    Mtail = [sum(m[j:]) for j in range(p + 1)]
    A, B, c, d = params.A, params.B, params.c, params.d
    X = A * B * c * d
    ab = [ak * bk for ak, bk in zip(params.a, params.b)]
    e = [_expi(t) for t in theta]
    eT = [_expi(t) for t in Theta]
    pre = qpochhammer(B * c, q, M) * qpochhammer(B * d, q, M) * _prod(qpochhammer(ab[k], q, m[k]) for k in range(p))
    total = 0
    for k in itertools.product(*(range(r + 1) for r in m)):
        K = sum(k)
        Ktail = [sum(k[j:]) for j in range(p + 1)]
        term = qpochhammer(X * q ** (M - 1), q, K) * qpochhammer(B * eT[0], q, K)
        term = term / (qpochhammer(B * c, q, K) * qpochhammer(B * d, q, K)) * q ** K
        for r in range(p):
            term = term * qpochhammer(q ** (-m[r]), q, k[r]) * qpochhammer(params.b[r] / e[r], q, k[r])
            term = term / (qpochhammer(q, q, k[r]) * qpochhammer(ab[r], q, k[r]))
        for r in range(1, p):
            if k[r]:
                term = term * (eT[r] / eT[0]) ** k[r] * q ** (-k[r] * (M - Mtail[r]))
        # a_1^{K_2} a_2^{K_3} ... a_{p-1}^{K_p}
        for s in range(p - 1):
            if Ktail[s + 1]:
                term = term / params.a[s] ** Ktail[s + 1]
        total = total + term
    return pre * total


def L_p_constant(n: Sequence[int], m: Sequence[int], params: ContinuousParams, tol: float = DEFAULT_TOL) -> complex:
    p, q = params.p, params.q
    n, m = _check_index(n, p), _check_index(m, p)
    A, B, c, d = params.A, params.B, params.c, params.d
    N, M = sum(n), sum(m)
    value = qpochhammer(A * c, q, N) * qpochhammer(A * d, q, N)
    value *= qpochhammer(B * c, q, M) * qpochhammer(B * d, q, M)
    value *= total_weight_closed(params, tol)
    for r in range(p):
        ab = params.a[r] * params.b[r]
        value *= qpochhammer(ab, q, m[r]) * qpochhammer(ab, q, n[r])
    return value


def inner_product_closed(n: Sequence[int], m: Sequence[int], params: ContinuousParams,
                         tol: float = DEFAULT_TOL) -> complex:
    """Closed form of the torus integral of P_n Pbar_m w: zero unless N = M.

    Uses the complete end-of-derivation expression, including the prefactor that
    the introductory statement of the result leaves out, corrected by q^{m_p} (q;q)_{m_p}.
    """
    p, q = params.p, params.q
    n, m = _check_index(n, p), _check_index(m, p)
    N, M = sum(n), sum(m)
    if N != M:
        return 0j
    X = params.A * params.B * params.c * params.d
    abp = params.a[-1] * params.b[-1]
    n_p, m_p = n[-1], m[-1]
    pre = L_p_constant(n, m, params, tol)
    pre *= qpochhammer(X * q ** (N - 1), q, N) * qpochhammer(abp * q ** (1 - N) / X, q, n_p)
    pre /= qpochhammer(X, q, N + m_p) * qpochhammer(abp, q, n_p)
    pre *= (-1) ** N * q ** (-(N * (N - 1)) // 2 - m_p - n_p) * (X * q ** N) ** n_p
    # q^{m_p} (q;q)_{m_p} is lost between the k_p = m_p evaluation and the printed
    # final form; with it the result matches the Askey-Wilson norm at p = 1
    pre *= q ** m_p * qpochhammer(q, q, m_p)
    total = 0j
    for k in itertools.product(*(range(mr + 1) for mr in m[:-1])):
        K = sum(k)
        # k_j carries the exponent 1 + sum_{r<j} (n_r - m_r)
        expo = sum(kj * (1 + sum(n[r] - m[r] for r in range(j))) for j, kj in enumerate(k))
        term = q ** expo
        term *= qpochhammer(X * q ** (N - 1), q, K) * qpochhammer(X * q ** N / abp, q, K)
        term /= qpochhammer(X * q ** (N + m_p), q, K) * qpochhammer(X * q ** (N - n_p) / abp, q, K)
        for r, kr in enumerate(k):
            ab = params.a[r] * params.b[r]
            term *= qpochhammer(q ** (-m[r]), q, kr) * qpochhammer(ab * q ** n[r], q, kr)
            term /= qpochhammer(q, q, kr) * qpochhammer(ab, q, kr)
        total += term
    return pre * total


def torus_quadrature(integrand, params: ContinuousParams, grid: int | None = None, jobs: int = 1):
    grid = grid or DEFAULT_GRID.get(params.p, 32)
    spec = TorusGridSpec(params.p, grid, lambda th: integrand(list(th)), jobs=jobs)
    return torus_integrate(spec)


def total_weight_quadrature(params: ContinuousParams, grid: int | None = None, tol: float = DEFAULT_TOL,
                            jobs: int = 1):
    return torus_quadrature(lambda th: weight_q(th, params, tol), params, grid, jobs)


def inner_product_quadrature(n, m, params: ContinuousParams, grid: int | None = None, tol: float = DEFAULT_TOL,
                             jobs: int = 1):
    def f(th):
        return qP(n, th, params) * qPbar(m, th, params) * weight_q(th, params, tol)

    return torus_quadrature(f, params, grid, jobs)


def verify_biorthogonality(n, m, params: ContinuousParams, grid: int | None = None, tol: float = 1e-6,
                           scale: float | None = None, max_p: int = MAX_VERIFY_DIM, jobs: int = 1,
                           product_tol: float = DEFAULT_TOL) -> VerificationReport:
    """Compare the torus quadrature of P_n Pbar_m w with the closed form.

    Off the diagonal (N != M) the residual is |quadrature| / scale, with scale
    defaulting to the larger of the two diagonal closed forms.
    """
    if params.p > max_p:
        raise InvalidParameters(f"quadrature verification is limited to p <= {max_p}")
    start = time.perf_counter()
    n, m = _check_index(n, params.p), _check_index(m, params.p)
    value, estimate = inner_product_quadrature(n, m, params, grid, product_tol, jobs)
    reference = inner_product_closed(n, m, params, product_tol)
    if sum(n) == sum(m):
        denom = abs(reference)
        if scale is None:
            scale = denom
        residual = abs(value - reference) / denom if denom else abs(value - reference)
        identity = "qwilson-diagonal"
    else:
        if scale is None:
            scale = max(abs(inner_product_closed(n, n, params, product_tol)),
                        abs(inner_product_closed(m, m, params, product_tol)))
        residual = abs(value) / scale
        identity = "qwilson-off-diagonal"
    if estimate > 10 * tol * scale:
        raise GridTooCoarse(
            f"grid halving changes the integral by {estimate:.3e}, above 10 x tol x scale = {10 * tol * scale:.3e}"
        )
    imag_ok = abs(value.imag) <= 10 * tol * max(abs(value.real), scale)
    status = "pass" if residual <= tol and imag_ok else "fail"
    return VerificationReport(
        identity_id=identity,
        inputs={**params.as_dict(), "n": ",".join(map(str, n)), "m": ",".join(map(str, m)),
                "grid": str(grid or DEFAULT_GRID.get(params.p, 32))},
        computed=format_value(value),
        reference=format_value(reference),
        residual=residual,
        status=status,
        runtime_ms=int((time.perf_counter() - start) * 1000),
        notes=f"two-resolution estimate {estimate:.3e}",
    )


def beta_free_total_weight(params: ContinuousParams, tol: float = DEFAULT_TOL) -> complex:
    """Closed total weight with the beta-dependent theta factors divided out."""
    value = total_weight_closed(params, tol)
    for k in range(1, params.p):
        t = params.b[k] * params.betas[k]
        value /= qpochhammer_inf(t, params.q, tol) * qpochhammer_inf(params.q / t, params.q, tol)
    return value


def beta_chain_defect(params: ContinuousParams) -> float:
    """Relative defect of A beta_p / a_p = beta b_1 / B."""
    lhs = params.A * params.betas[-1] / params.a[-1]
    rhs = params.beta * params.b[0] / params.B
    return abs(lhs - rhs) / abs(rhs)


@dataclass(frozen=True)
class AskeyRoyParams:
    """Parameters of the single inner integral over theta_2 that drives the reduction.

    ``phi`` stands for Theta - Theta_3, held fixed while theta_2 is integrated.
    """

    a1: float
    a2: float
    b1: float
    b2: float
    beta: float
    phi: float
    q: float

    def __post_init__(self) -> None:
        if max(abs(self.a1), abs(self.a2), abs(self.b1), abs(self.b2)) >= 1 or not 0 < abs(self.q) < 1:
            raise InvalidParameters("need max(|a1|,|a2|,|b1|,|b2|) < 1 and 0 < |q| < 1")

    @property
    def beta2(self) -> float:
        return self.beta / (self.a1 * self.b2)

    def as_dict(self) -> dict[str, str]:
        return {k: repr(getattr(self, k)) for k in ("a1", "a2", "b1", "b2", "beta", "phi", "q")}


def askey_roy_integrand(theta2, ar: AskeyRoyParams, tol: float = DEFAULT_TOL):
    """Integrand over theta_2, including its 1/(2 pi)."""
    q, b2t = ar.q, ar.beta2
    e = _expi(theta2)
    f = _expi(ar.phi)
    num = (qpochhammer_inf(b2t * e, q, tol) * qpochhammer_inf(q * e / (f * ar.beta), q, tol)
           * qpochhammer_inf(q / (b2t * e), q, tol) * qpochhammer_inf(ar.beta * f / e, q, tol))
    den = (qpochhammer_inf(ar.a2 * e, q, tol) * qpochhammer_inf(ar.b1 * e / f, q, tol)
           * qpochhammer_inf(ar.b2 / e, q, tol) * qpochhammer_inf(ar.a1 * f / e, q, tol))
    return num / den / (2 * math.pi)


def askey_roy_closed(ar: AskeyRoyParams, tol: float = DEFAULT_TOL) -> complex:
    q, b2t = ar.q, ar.beta2
    f = _expi(ar.phi)
    num = qpochhammer_inf_multi((ar.b2 * b2t, q / (ar.b2 * b2t), ar.a1 * ar.a2 * ar.b1 * ar.b2,
                                 ar.a1 * b2t * f, q / (ar.a1 * b2t * f)), q, tol)
    den = qpochhammer_inf_multi((q, ar.a1 * ar.b1, ar.a2 * ar.b2, ar.a1 * ar.a2 * f, ar.b1 * ar.b2 / f), q, tol)
    return num / den


def askey_roy_quadrature(ar: AskeyRoyParams, grid: int = 256, tol: float = DEFAULT_TOL):
    spec = TorusGridSpec(1, grid, lambda th: askey_roy_integrand(th[0], ar, tol))
    return torus_integrate(spec)


def limit_params(a: Sequence[float], b: Sequence[float], c: float, d: float, q: float,
                 beta: float = 0.4) -> ContinuousParams:
    """q-parameters q^{a_k}, q^{b_k}, q^c, q^d for the q -> 1 limit."""
    return ContinuousParams(tuple(q ** v for v in a), tuple(q ** v for v in b), q ** c, q ** d, beta, q)


def limit_angles(x: Sequence[float], q: float) -> list[float]:
    """theta_k with e^{i theta_k} = q^{i x_k}."""
    return [xk * math.log(q) for xk in x]


def scaled_qP(n, x, a, b, c, d, q: float) -> complex:
    """qP at the limit parameterization divided by (1 - q)^{3N}."""
    params = limit_params(a, b, c, d, q)
    return qP(n, limit_angles(x, q), params) / (1 - q) ** (3 * sum(n))


def scaled_qPbar(m, x, a, b, c, d, q: float) -> complex:
    params = limit_params(a, b, c, d, q)
    return qPbar(m, limit_angles(x, q), params) / (1 - q) ** (3 * sum(m))
