"""Relativistic (alpha^2) and radiative (alpha^3) energy corrections.

All pieces are first-order perturbations evaluated on the solved
(nuclear-motion) ground state; the inputs are the four expectation values
and the physical constants.  For a singlet S ground state the orbit-orbit
and spin-spin Breit terms vanish identically, so they are carried as
explicit zeros rather than silently dropped.

  E1 = -(alpha^2/8) <p1^4 + p2^4>                    (momentum quartic)
  E4 = pi alpha^2 (Z <delta(r1)> - <delta(r12)>)     (Darwin contact)
  E5 = 2 pi alpha^2 <delta(r12)>                     (exchange contact)

  dE3_nuclear = alpha^3 (4Z/3)(-2 ln alpha - beta + 19/30) * 2<delta(r1)>
  dE3_contact = alpha^3 ((14/3) ln alpha + 164/15) <delta(r12)>
  dE3_logmom  = alpha^3 (7 / 3 pi) Q

The quoted uncertainty follows the rule of thumb that the truncated series
is good to about half its last retained order.
"""

from dataclasses import dataclass

from mpmath import mp


@dataclass(frozen=True)
class CorrectionBreakdown:
    """Every correction term (mpf), the totals, and the experiment gap."""

    E0: object
    E1: object
    E2: object                 # orbit-orbit: zero for singlet S
    E3: object                 # spin-spin: zero for singlet S
    E4: object
    E5: object
    deltaE2: object
    r3_nuclear: object
    r3_contact: object
    r3_logmom: object
    deltaE3: object
    E_total: object
    uncertainty: object
    delta_vs_experiment: object


def breit_correction(expectations, constants):
    """(E1, E2, E3, E4, E5, deltaE2) on the given state."""
    alpha = constants.alpha_mp()
    p4_pair = 2 * expectations.p4
    E1 = -(alpha ** 2) / 8 * p4_pair
    E2 = mp.mpf(0)
    E3 = mp.mpf(0)
    E4 = mp.pi * alpha ** 2 * (constants.Z * expectations.delta_r1
                               - expectations.delta_r12)
    E5 = 2 * mp.pi * alpha ** 2 * expectations.delta_r12
    return E1, E2, E3, E4, E5, E1 + E2 + E3 + E4 + E5


def radiative_correction(expectations, constants):
    """(r3_nuclear, r3_contact, r3_logmom, deltaE3) on the given state."""
    alpha = constants.alpha_mp()
    if alpha == 0:
        zero = mp.mpf(0)
        return zero, zero, zero, zero
    beta = constants.beta_mp()
    ln_alpha = mp.ln(alpha)
    r3n = (alpha ** 3 * (4 * constants.Z / mp.mpf(3))
           * (-2 * ln_alpha - beta + mp.mpf(19) / 30)
           * (2 * expectations.delta_r1))
    r3c = (alpha ** 3 * (mp.mpf(14) / 3 * ln_alpha + mp.mpf(164) / 15)
           * expectations.delta_r12)
    r3l = alpha ** 3 * mp.mpf(7) / (3 * mp.pi) * expectations.log_momentum
    return r3n, r3c, r3l, r3n + r3c + r3l


def total_energy(E0, expectations, constants):
    """Assemble the full breakdown around a variational energy E0."""
    E1, E2, E3, E4, E5, dE2 = breit_correction(expectations, constants)
    r3n, r3c, r3l, dE3 = radiative_correction(expectations, constants)
    E_total = mp.mpf(E0) + dE2 + dE3
    return CorrectionBreakdown(
        E0=mp.mpf(E0), E1=E1, E2=E2, E3=E3, E4=E4, E5=E5, deltaE2=dE2,
        r3_nuclear=r3n, r3_contact=r3c, r3_logmom=r3l, deltaE3=dE3,
        E_total=E_total, uncertainty=abs(dE3) / 2,
        delta_vs_experiment=E_total - constants.e_exp_mp())
