"""Integrals over the Hylleraas domain 0 <= t <= u <= s < infinity.

Exact closed forms for the polynomial family against the weight e^{-2s}
(k = 1 scale), a ln(u)-weighted variant built from digamma moments, and a
Gauss tensor quadrature engine for everything else.

Two integral families matter and must not be conflated:

  raw_moment(a, b, c)     int e^{-2s} s^a t^b u^c            (no volume factor)
  base_integral(a, b, c)  int e^{-2s} s^a t^b u^c * u(s^2-t^2)

The full measure is d tau1 d tau2 = 2 pi^2 u(s^2 - t^2) ds dt du; the 2 pi^2
is applied by callers (it cancels in every ratio the pipeline forms).
Integrands that arrive from the chain rule "already multiplied" by the
volume element (kinetic, mass polarization, potential after cancellation)
go through raw_moment.

Scaling: against e^{-2ks} every value picks up k^{-(a+b+c+3)} for raw keys,
k^{-(a+b+c+6)} for base keys; ln(u) keys obey J(k) = (J(1) - ln k * I(1)) k^{-p}.
"""

import json
import math
import threading
from fractions import Fraction
from functools import lru_cache

import numpy as np
from mpmath import mp
from scipy.special import roots_laguerre, roots_legendre

ENGINE_VERSION = "hyhe-integrals-1"


class IntegralDomainError(ValueError):
    """Exponents outside the closed-form family; caller should use quadrature."""


class QuadratureError(RuntimeError):
    def __init__(self, message, best_estimate, achieved):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.achieved = achieved


@lru_cache(maxsize=None)
def raw_moment(a, b, c):
    """Exact int_0^inf ds int_0^s du int_0^u dt e^{-2s} s^a t^b u^c.

    Nested antiderivatives: t-integral u^{b+1}/(b+1), u-integral
    s^{b+c+2}/(b+c+2), s-integral Gamma(a+b+c+3)/2^{a+b+c+3}.
    b must be >= 0 (odd-t projection happens upstream); c may be negative
    as long as b + c + 1 >= 0 and the final Gamma argument is positive.
    Memoized; values are immutable Fractions, so hits are bit-identical.
    """
    if b < 0:
        raise IntegralDomainError(f"t-exponent must be >= 0, got b={b}")
    if b + c + 1 < 0:
        raise IntegralDomainError(f"u-integral diverges: b+c+1 = {b + c + 1}")
    n = a + b + c + 2  # s-moment order
    if n < 0:
        raise IntegralDomainError(f"s-integral diverges: a+b+c+2 = {n}")
    return Fraction(math.factorial(n), 2 ** (n + 1)) / ((b + 1) * (b + c + 2))


def base_integral(a, b, c):
    """Exact base integral including the volume factor u(s^2 - t^2)."""
    if a < 0 or b < 0 or c < 0:
        raise IntegralDomainError(
            f"base_integral requires a, b, c >= 0, got ({a}, {b}, {c})")
    return raw_moment(a + 2, b, c + 1) - raw_moment(a, b + 2, c + 1)


def k_scaling_exponent(a, b, c, with_volume=True):
    """p such that I(k) = I(1) * k^{-p} when the weight is e^{-2ks}."""
    return a + b + c + (6 if with_volume else 3)


def log_raw_moment(a, b, c):
    """mpf value of int e^{-2s} s^a t^b u^c ln(u), same domain.

    From int_0^s u^q ln u du = s^{q+1} (ln s/(q+1) - 1/(q+1)^2) with
    q = b + c + 1, then int e^{-2s} s^M ln s ds = M!/2^{M+1} (psi(M+1) - ln 2).
    """
    if b < 0 or b + c + 1 < 0:
        raise IntegralDomainError(f"log moment outside family: b={b}, c={c}")
    M = a + b + c + 2
    if M < 0:
        raise IntegralDomainError(f"log moment diverges: a+b+c+2 = {M}")
    denom = (b + 1) * (b + c + 2)
    smom = mp.factorial(M) / mp.mpf(2) ** (M + 1)
    return smom * (mp.digamma(M + 1) - mp.ln(2)) / denom - smom / ((b + c + 2) * denom)


def log_base_integral(a, b, c):
    """Base integral with an extra ln(u) weight (high-precision float)."""
    if a < 0 or b < 0 or c < 0:
        raise IntegralDomainError(
            f"log_integral requires a, b, c >= 0, got ({a}, {b}, {c})")
    return log_raw_moment(a + 2, b, c + 1) - log_raw_moment(a, b + 2, c + 1)


# short public name
log_integral = log_base_integral


def base_integral_real(a, b, c):
    """Analytic continuation of base_integral to real c (mpf).

    Same nested antiderivatives with Gamma in place of factorial; used to
    check d/dc base = log integral by finite differences.
    """
    def raw(aa, bb, cc):
        if bb < 0 or bb + cc + 1 <= -1:
            raise IntegralDomainError(f"outside family: b={bb}, c={cc}")
        n = mp.mpf(aa + bb) + cc + 2
        return mp.gamma(n + 1) / mp.mpf(2) ** (n + 1) / ((bb + 1) * (bb + cc + 2))
    return raw(a + 2, b, c + 1) - raw(a, b + 2, c + 1)


def log_integral_quad_mp(a, b, c):
    """Numerical (tanh-sinh) evaluation of the ln(u)-weighted base integral.

    Under s = x/2, u = y s, t = z u the integrand separates:
    e^{-2s} s^{a+b+c+5} y^{b+c+2} z^b (1 - y^2 z^2), with ln u = ln s + ln y.
    Each univariate factor is integrated numerically, so this is an
    independent cross-check of the digamma closed form at working precision.
    """
    if a < 0 or b < 0 or c < 0:
        raise IntegralDomainError(
            f"log quadrature requires a, b, c >= 0, got ({a}, {b}, {c})")
    total = mp.mpf(0)
    for sign, dy, dz in ((1, 0, 0), (-1, 2, 2)):
        P = a + b + c + 5
        Y = b + c + 2 + dy
        Z = b + dz
        s0 = mp.quad(lambda s: mp.e ** (-2 * s) * s ** P, [0, mp.inf])
        s1 = mp.quad(lambda s: mp.e ** (-2 * s) * s ** P * mp.ln(s), [0, mp.inf])
        y0 = mp.quad(lambda y: y ** Y, [0, 1])
        y1 = mp.quad(lambda y: y ** Y * mp.ln(y), [0, 1])
        z0 = mp.quad(lambda z: z ** Z, [0, 1])
        total += sign * (s1 * y0 + s0 * y1) * z0
    return total


class IntegralTable:
    """Explicit integral cache with optional on-disk JSON persistence.

    Caches both closed-form families ("raw" volume-cancelled moments, which
    matrix assembly consumes, and "base" volume-included integrals).  A
    version mismatch silently invalidates a cache file.  Thread-safe; warm
    hits are bit-identical to cold computation because only final exact
    Fractions are stored.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._maps = {"raw": {}, "base": {}}
        self.hits = 0
        self.misses = 0

    def _get(self, family, key, compute):
        with self._lock:
            store = self._maps[family]
            if key in store:
                self.hits += 1
                return store[key]
        value = compute(*key)
        with self._lock:
            self._maps[family][key] = value
            self.misses += 1
        return value

    def raw(self, a, b, c):
        return self._get("raw", (a, b, c), raw_moment)

    def base(self, a, b, c):
        return self._get("base", (a, b, c), base_integral)

    def k_scaling(self, a, b, c):
        return k_scaling_exponent(a, b, c, with_volume=True)

    def stats(self):
        with self._lock:
            return {"entries": sum(len(m) for m in self._maps.values()),
                    "hits": self.hits, "misses": self.misses}

    def save(self, path):
        with self._lock:
            payload = {
                "engine": ENGINE_VERSION,
                **{family: {f"{a},{b},{c}": f"{v.numerator}/{v.denominator}"
                            for (a, b, c), v in sorted(store.items())}
                   for family, store in self._maps.items()},
            }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=0, sort_keys=True)

    def load(self, path):
        """Merge a cache file in; returns False on a missing/stale file."""
        try:
            with open(path) as fh:
                payload = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return False
        if payload.get("engine") != ENGINE_VERSION:
            return False
        for family in ("raw", "base"):
            loaded = {}
            for key, sval in payload.get(family, {}).items():
                a, b, c = (int(x) for x in key.split(","))
                num, _, den = sval.partition("/")
                loaded[(a, b, c)] = Fraction(int(num), int(den or 1))
            with self._lock:
                self._maps[family].update(loaded)
        return True


# ---------------------------------------------------------------------------
# quadrature engine
# ---------------------------------------------------------------------------

_rule_cache = {}


def _tensor_rule(n):
    """Nodes/weights for the box map s = x/2 (Laguerre), u = y*s, t = z*u."""
    if n in _rule_cache:
        return _rule_cache[n]
    xs, ws = roots_laguerre(n)
    ys, wys = roots_legendre(n)
    # shift Legendre to [0, 1]
    ys = 0.5 * (ys + 1.0)
    wys = 0.5 * wys
    s = xs[:, None, None] / 2.0
    y = ys[None, :, None]
    z = ys[None, None, :]
    u = y * s
    t = z * u
    # e^{-2s} ds = e^{-x} dx / 2; du dt = (s dy)(u dz)
    w = (ws[:, None, None] / 2.0) * wys[None, :, None] * wys[None, None, :]
    jac = s * u
    rule = (s, t, u, w * jac)
    _rule_cache[n] = rule
    return rule


_LEVELS = (12, 16, 24, 32, 48, 64, 96)


def quad_integral(f, target=1e-14, levels=_LEVELS):
    """Adaptive tensor quadrature of f(s, t, u) against e^{-2s} over the domain.

    ``f`` is evaluated on numpy arrays (vectorize accordingly) and must NOT
    include the e^{-2s} weight.  Node count escalates until two successive
    levels agree within ``target`` (relative for |value| > 1); raises
    QuadratureError carrying the best estimate if the budget runs out.
    Summation is compensated (fsum), so accuracy is limited by the rule, not
    by accumulation.
    """
    prev = None
    best = None
    achieved = math.inf
    for n in levels:
        s, t, u, w = _tensor_rule(n)
        val = math.fsum((f(s, t, u) * w).ravel())
        if prev is not None:
            err = abs(val - prev)
            if err < achieved:
                achieved = err
                best = val
            if err <= target * max(1.0, abs(val)):
                return val
        prev = val
    raise QuadratureError(
        f"quadrature did not reach {target:g} (achieved {achieved:g})",
        best if best is not None else prev, achieved)


def quad_base_integral(a, b, c, log_u=False, target=1e-13):
    """Quadrature route to the (possibly ln u weighted) base integral."""
    def f(s, t, u):
        val = s ** a * t ** b * u ** c * u * (s ** 2 - t ** 2)
        if log_u:
            val = val * np.log(u)
        return val
    return quad_integral(f, target=target)


WEIGHT_NONE = "none"
WEIGHT_LN_U = "ln_u"
WEIGHT_VOLUME_CANCELLED = "volume_cancelled"


def integral_for(expr, extra_weight=WEIGHT_NONE, table=None):
    """Dispatch a SteuExpression with the e^{-2s} tag to the exact families.

    ``none``: monomials get the volume factor (base family).
    ``ln_u``: base family with the ln(u) weight.
    ``volume_cancelled``: integrand already contains the volume element, so
    monomials go straight to raw moments.
    Returns an mpf at the active precision (sum of exact pieces).
    """
    if expr.exp_degree != 2:
        raise IntegralDomainError(
            f"integral_for expects an e^{{-2s}} product, got degree {expr.exp_degree}")
    total = mp.mpf(0)
    for (a, b, c), v in expr.terms.items():
        vmp = mp.mpf(v.numerator) / v.denominator
        if extra_weight == WEIGHT_NONE:
            piece = table.base(a, b, c) if table is not None else base_integral(a, b, c)
            total += vmp * mp.mpf(piece.numerator) / piece.denominator
        elif extra_weight == WEIGHT_LN_U:
            total += vmp * log_base_integral(a, b, c)
        elif extra_weight == WEIGHT_VOLUME_CANCELLED:
            piece = raw_moment(a, b, c)
            total += vmp * mp.mpf(piece.numerator) / piece.denominator
        else:
            raise IntegralDomainError(f"unknown extra_weight {extra_weight!r}")
    return total


# ---------------------------------------------------------------------------
# high-precision Gauss rules (exact for polynomials at working precision);
# used by tests that need closed-form-vs-quadrature agreement below 1e-14
# ---------------------------------------------------------------------------

_mp_rule_cache = {}


def _mp_legendre_rule(n):
    """Gauss-Legendre nodes/weights on [0, 1] at working precision."""
    key = (n, mp.dps)
    if key in _mp_rule_cache:
        return _mp_rule_cache[key]
    seeds, _ = np.polynomial.legendre.leggauss(n)
    nodes, weights = [], []
    for x0 in seeds:
        x = mp.mpf(float(x0))
        for _ in range(60):
            p = mp.legendre(n, x)
            dp = n * (x * mp.legendre(n, x) - mp.legendre(n - 1, x)) / (x * x - 1)
            step = p / dp
            x -= step
            if abs(step) < mp.mpf(10) ** (-mp.dps + 2):
                break
        dp = n * (x * mp.legendre(n, x) - mp.legendre(n - 1, x)) / (x * x - 1)
        w = 2 / ((1 - x * x) * dp * dp)
        nodes.append((x + 1) / 2)
        weights.append(w / 2)
    _mp_rule_cache[key] = (nodes, weights)
    return nodes, weights


def _mp_laguerre_rule(n):
    """Gauss-Laguerre nodes/weights (weight e^{-x}) at working precision."""
    key = ("lag", n, mp.dps)
    if key in _mp_rule_cache:
        return _mp_rule_cache[key]
    seeds, _ = np.polynomial.laguerre.laggauss(n)
    nodes, weights = [], []
    for x0 in seeds:
        x = mp.mpf(float(x0))
        for _ in range(60):
            p = mp.laguerre(n, 0, x)
            dp = n * (mp.laguerre(n, 0, x) - mp.laguerre(n - 1, 0, x)) / x
            step = p / dp
            x -= step
            if abs(step) < mp.mpf(10) ** (-mp.dps + 2) * max(1, abs(x)):
                break
        dp = n * (mp.laguerre(n, 0, x) - mp.laguerre(n - 1, 0, x)) / x
        lnm1 = mp.laguerre(n - 1, 0, x)
        # standard Gauss-Laguerre weight x / ((n+1)^2 L_{n+1}(x)^2) variant:
        w = x / (n * n * lnm1 * lnm1)
        nodes.append(x)
        weights.append(w)
    _mp_rule_cache[key] = (nodes, weights)
    return nodes, weights


def quad_base_integral_mp(a, b, c, log_u=False, nodes=None):
    """High-precision tensor quadrature of the base integral.

    Gaussian rules are exact for polynomial integrands once the node count
    covers the degree, so this matches the closed forms to working precision,
    far below float64.  The ln(u) = ln(y) + ln(s) split keeps the
    log factor out of the polynomial part only for error, not exactness, so
    log keys come out near quadrature precision rather than exactly.
    """
    deg_s = a + b + c + 5
    deg_y = b + c + 3
    deg_x = b + 2
    if nodes is None:
        nodes = max(deg_s, deg_y, deg_x) // 2 + 6 + (8 if log_u else 0)
    xs, wxs = _mp_laguerre_rule(nodes)
    ys, wys = _mp_legendre_rule(nodes)
    total = mp.mpf(0)
    for xi, wi in zip(xs, wxs):
        s = xi / 2
        acc_s = mp.mpf(0)
        for yj, wj in zip(ys, wys):
            u = yj * s
            acc_y = mp.mpf(0)
            for zk, wk in zip(ys, wys):
                t = zk * u
                val = s ** a * t ** b * u ** c * u * (s * s - t * t)
                if log_u:
                    val = val * mp.ln(u)
                acc_y += wk * val
            acc_s += wj * acc_y * u  # dt = u dz
        total += wi / 2 * acc_s * s  # du = s dy, ds = dx/2
    return total
