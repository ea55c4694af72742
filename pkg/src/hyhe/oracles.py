"""Independent cross-checks in explicit Cartesian coordinates.

Everything here works from electron position vectors and finite differences,
deliberately sharing no code with the closed-form integral engine: these are
the referees, not the players.  The only imports from the package are basis
term *definitions* (the shared contract), never integral or matrix routines.

Also provides the one-parameter product-state (hydrogenic screening) limits,
where every pipeline quantity has a pencil-and-paper value, and a standalone
tensor quadrature built on numpy's Gauss rules (the production engine uses
scipy's -- independent node/weight computations).
"""

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp


@dataclass(frozen=True)
class ElectronConfiguration:
    """Explicit electron positions (nucleus at the origin)."""

    r1: np.ndarray
    r2: np.ndarray


def stu_of(r1, r2):
    """Collective coordinates (s, t, u) of a configuration."""
    a = float(np.linalg.norm(r1))
    b = float(np.linalg.norm(r2))
    u = float(np.linalg.norm(np.asarray(r1) - np.asarray(r2)))
    return a + b, b - a, u


def random_configurations(count, seed=0, r_lo=0.3, r_hi=2.0, min_sep=0.3):
    """Reproducible generic configurations, kept away from coalescences."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        d1 = rng.normal(size=3)
        d2 = rng.normal(size=3)
        r1 = d1 / np.linalg.norm(d1) * rng.uniform(r_lo, r_hi)
        r2 = d2 / np.linalg.norm(d2) * rng.uniform(r_lo, r_hi)
        if np.linalg.norm(r1 - r2) < min_sep:
            continue
        out.append(ElectronConfiguration(r1=r1, r2=r2))
    return out


class CartesianProbe:
    """A trial state evaluated from raw positions, with FD derivatives.

    coeffs may be floats or mpf; everything is coerced to float64, which is
    plenty for finite-difference comparisons at 1e-6..1e-12.
    """

    def __init__(self, basis, coeffs, k):
        self.terms = [(t.l, 2 * t.m, t.n, float(c)) for t, c in zip(basis, coeffs)]
        self.k = float(k)

    def value_stu(self, s, t, u):
        ks, kt, ku = self.k * s, self.k * t, self.k * u
        tot = 0.0
        for l, tt, n, c in self.terms:
            tot += c * ks ** l * kt ** tt * ku ** n
        return tot * math.exp(-ks)

    def value(self, cfg):
        return self.value_stu(*stu_of(cfg.r1, cfg.r2))

    def _shifted(self, cfg, electron, axis, delta):
        r1 = np.array(cfg.r1, dtype=float)
        r2 = np.array(cfg.r2, dtype=float)
        (r1 if electron == 1 else r2)[axis] += delta
        return ElectronConfiguration(r1=r1, r2=r2)

    def gradient_fd(self, cfg, electron, h=1e-6):
        """Central-difference gradient with respect to one electron."""
        g = np.zeros(3)
        for axis in range(3):
            fp = self.value(self._shifted(cfg, electron, axis, +h))
            fm = self.value(self._shifted(cfg, electron, axis, -h))
            g[axis] = (fp - fm) / (2 * h)
        return g

    def laplacian_fd(self, cfg, electron=1, h=1e-3):
        """7-point Laplacian, Richardson-extrapolated (h and h/2)."""
        def lap(hh):
            tot = -6.0 * self.value(cfg)
            for axis in range(3):
                tot += self.value(self._shifted(cfg, electron, axis, +hh))
                tot += self.value(self._shifted(cfg, electron, axis, -hh))
            return tot / (hh * hh)
        coarse, fine = lap(h), lap(h / 2)
        return (4 * fine - coarse) / 3

    def grad12_dot_n_fd(self, cfg, h=1e-5):
        """n . (grad_1 - grad_2)/2 by Richardson central differences.

        n is the unit vector along r1 - r2; the h and h/2 stencils knock the
        error down to O(h^4) ~ 1e-12 analytically, roundoff-limited ~1e-9.
        """
        n = (cfg.r1 - cfg.r2) / np.linalg.norm(cfg.r1 - cfg.r2)

        def along(hh):
            fp1 = self.value(ElectronConfiguration(cfg.r1 + hh * n, cfg.r2))
            fm1 = self.value(ElectronConfiguration(cfg.r1 - hh * n, cfg.r2))
            fp2 = self.value(ElectronConfiguration(cfg.r1, cfg.r2 + hh * n))
            fm2 = self.value(ElectronConfiguration(cfg.r1, cfg.r2 - hh * n))
            return ((fp1 - fm1) - (fp2 - fm2)) / (4 * hh)
        coarse, fine = along(h), along(h / 2)
        return (4 * fine - coarse) / 3


def attraction_identity_residual(cfg):
    """|(1/r1 + 1/r2) u(s^2-t^2) - 4su| at a configuration.

    This is the algebraic cancellation that turns the nuclear attraction
    into a polynomial integrand; it must hold pointwise, not just under the
    integral sign.
    """
    r1 = float(np.linalg.norm(cfg.r1))
    r2 = float(np.linalg.norm(cfg.r2))
    s, t, u = stu_of(cfg.r1, cfg.r2)
    lhs = (1.0 / r1 + 1.0 / r2) * u * (s * s - t * t)
    return abs(lhs - 4.0 * s * u)


def direction_cosines(cfg):
    """(r1_hat . n, r2_hat . n) with n along r1 - r2, from raw vectors."""
    n = (cfg.r1 - cfg.r2) / np.linalg.norm(cfg.r1 - cfg.r2)
    c1 = float(np.dot(cfg.r1, n) / np.linalg.norm(cfg.r1))
    c2 = float(np.dot(cfg.r2, n) / np.linalg.norm(cfg.r2))
    return c1, c2


# ---------------------------------------------------------------------------
# product-state (single-term) closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HydrogenicReference:
    """Closed forms for the bare e^{-k(r1+r2)} trial state."""

    k: object
    energy: object        # k^2 - (2Z - 5/8) k
    k_star: object        # Z - 5/16
    delta_r1: object      # k^3 / pi
    delta_r12: object     # k^3 / (8 pi)
    p4: object            # 5 k^4 (single electron)
    log_momentum: object  # k^3 (ln2/4 - 1/3 + ln(k)/4)


def hydrogenic_reference(k, Z=2):
    km = mp.mpf(k)
    return HydrogenicReference(
        k=km,
        energy=km ** 2 - (2 * Z - mp.mpf(5) / 8) * km,
        k_star=Z - mp.mpf(5) / 16,
        delta_r1=km ** 3 / mp.pi,
        delta_r12=km ** 3 / (8 * mp.pi),
        p4=5 * km ** 4,
        log_momentum=km ** 3 * (mp.ln(2) / 4 - mp.mpf(1) / 3 + mp.ln(km) / 4),
    )


# ---------------------------------------------------------------------------
# standalone quadrature (numpy Gauss rules; the engine under test uses scipy)
# ---------------------------------------------------------------------------

def gauss_tensor_value(f, n=48):
    """One-shot float64 tensor quadrature of f(s,t,u) e^{-2s} over the domain."""
    xs, ws = np.polynomial.laguerre.laggauss(n)
    ys, wys = np.polynomial.legendre.leggauss(n)
    ys = 0.5 * (ys + 1.0)
    wys = 0.5 * wys
    s = xs[:, None, None] / 2.0
    u = ys[None, :, None] * s
    t = ys[None, None, :] * u
    w = (ws[:, None, None] / 2.0) * wys[None, :, None] * wys[None, None, :] * s * u
    return math.fsum((f(s, t, u) * w).ravel())


def triple_quad_mp(f, maxdegree=5):
    """Nested tanh-sinh quadrature of f(s,t,u) e^{-2s}; slow but unbiased.

    Use only for single spot values in tests -- cost grows as the cube of
    the node count.  Inner intervals shorter than the working epsilon are
    handled by the midpoint rule; mpmath's convergence estimator divides by
    zero on degenerate exact-polynomial intervals otherwise.
    """
    tiny = mp.mpf(10) ** (-mp.dps // 2)

    def inner(s, u):
        if u < tiny:
            return u * f(s, u / 2, u)
        return mp.quad(lambda t: f(s, t, u), [0, u], maxdegree=maxdegree)

    def middle(s):
        if s < tiny:
            return s * inner(s, s / 2)
        return mp.quad(lambda u: inner(s, u), [0, s], maxdegree=maxdegree)

    return mp.quad(lambda s: mp.e ** (-2 * s) * middle(s),
                   [0, mp.inf], maxdegree=maxdegree + 2)
