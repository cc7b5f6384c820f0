"""Secret-key-rate formulas for the dual-homodyne relay protocol.

Five evaluation paths are exposed, all returning a :class:`KeyRateReport`
in bits per relay use (negative rates are reported unclamped and flagged
via ``secure``):

- :func:`key_rate` — the general rate xi * I_AB - I_EA for an explicit
  attack ancilla, with automatic dispatch to the symmetric closed form
  when the links are degenerate.
- :func:`key_rate_closed_sym` / :func:`key_rate_closed_asym` — closed
  forms in the effective noises (lam, lam') for symmetric and asymmetric
  links.  Algebraically identical to the general rate on the
  anticorrelation bisector.
- :func:`key_rate_min_thermal` — worst case over the adversary's
  correlations when the thermal noises (omega_a, omega_b) are known:
  evaluated at lam = lam' = kappa + u * |g|_max.
- :func:`key_rate_min_chi` — worst case when the equivalent noise chi is
  known instead (the operationally estimated quantity).

Alice's raw key is always the reference; swapping tau_a and tau_b
evaluates the opposite reference choice.  The formulas assume the
large-modulation regime, so mu enters only through mu^(xi-1) and the
mutual information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    SYMMETRIC_TAU_TOL,
    AncillaState,
    DerivedNoise,
    DomainError,
    LinkPair,
    NonphysicalStateError,
    ProtocolParams,
    SymmetricDegenerateError,
    derive_noise,
    entropy_h,
    g_max,
    is_physical,
)

E_SQUARED = math.e * math.e


@dataclass(frozen=True)
class KeyRateReport:
    """Rate plus the intermediates that produced it.

    ``rate = xi * i_ab - i_ea`` holds on every path; ``secure`` is simply
    ``rate > 0``.  The ``nu*`` symplectic-style intermediates are filled
    where the producing formula defines them.
    """

    rate: float
    i_ab: float
    i_ea: float
    chi: float
    secure: bool
    formula_tag: str
    nu: float | None = None
    nu1: float | None = None
    nu2: float | None = None
    nu3: float | None = None


def mutual_information(mu: float, chi: float) -> float:
    """Shared information of the honest parties: log2(mu / chi)."""
    if chi <= 0.0:
        raise DomainError(f"chi must be > 0, got {chi}")
    if mu <= 0.0:
        raise DomainError(f"mu must be > 0, got {mu}")
    return math.log2(mu / chi)


def eve_holevo(link: LinkPair, noise: DerivedNoise, mu: float) -> float:
    """Holevo bound on the adversary's information about Alice's raw key:

    h(sqrt(lam lam') / |dtau|) + log2(e |dtau| mu / (2 beta)) - h(nu),
    nu = sqrt((tau_a + lam)(tau_a + lam')) / tau_b.

    Only defined for asymmetric links; the symmetric limit is reached
    through the closed forms.
    """
    dt = link.delta_tau
    if dt < SYMMETRIC_TAU_TOL:
        raise SymmetricDegenerateError(
            "Holevo term is degenerate for symmetric links; "
            "use the symmetric closed form"
        )
    prod = noise.lam * noise.lam_prime
    if prod < 0.0:
        raise DomainError(f"lam * lam' = {prod} < 0: Holevo bound undefined")
    nfac = (link.tau_a + noise.lam) * (link.tau_a + noise.lam_prime)
    if nfac < 0.0:
        raise DomainError("noise symplectic value undefined")
    nu = math.sqrt(nfac) / link.tau_b
    return (
        entropy_h(math.sqrt(prod) / dt)
        + math.log2(math.e * dt * mu / (2.0 * link.beta))
        - entropy_h(nu)
    )


def key_rate(
    protocol: ProtocolParams, link: LinkPair, ancilla: AncillaState
) -> KeyRateReport:
    """General rate xi * I_AB - I_EA against an explicit attack ancilla.

    The ancilla must be physical.  Symmetric links dispatch to
    :func:`key_rate_closed_sym`, which is the analytic limit of the
    general expression.
    """
    if not is_physical(ancilla):
        raise NonphysicalStateError(
            f"attack covariance is not physical: {ancilla}"
        )
    noise = derive_noise(link, ancilla)
    if link.is_symmetric:
        tau = 0.5 * (link.tau_a + link.tau_b)
        return key_rate_closed_sym(protocol, tau, noise.lam, noise.lam_prime)
    i_ab = mutual_information(protocol.mu, noise.chi)
    i_ea = eve_holevo(link, noise, protocol.mu)
    rate = protocol.xi * i_ab - i_ea
    nu = math.sqrt((link.tau_a + noise.lam) * (link.tau_a + noise.lam_prime)) / link.tau_b
    return KeyRateReport(
        rate=rate,
        i_ab=i_ab,
        i_ea=i_ea,
        chi=noise.chi,
        secure=rate > 0.0,
        formula_tag="general",
        nu=nu,
    )


def key_rate_closed_sym(
    protocol: ProtocolParams, tau: float, lam: float, lam_prime: float
) -> KeyRateReport:
    """Closed form for symmetric links tau_a = tau_b = tau:

    R = log2(8 tau mu^(xi-1) / (e^2 chi^xi sqrt(lam lam'))) + h(nu1),
    nu1 = sqrt((tau + lam)(tau + lam')) / tau.

    lam = lam' = 0 (lossless links, adversary decoupled) degenerates to
    R = xi log2(mu / 4).
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    mu, xi = protocol.mu, protocol.xi
    if lam == 0.0 and lam_prime == 0.0:
        i_ab = mutual_information(mu, 4.0)
        rate = xi * i_ab
        return KeyRateReport(
            rate=rate, i_ab=i_ab, i_ea=0.0, chi=4.0,
            secure=rate > 0.0, formula_tag="symmetric-closed", nu1=1.0,
        )
    if lam <= 0.0 or lam_prime <= 0.0:
        raise DomainError(
            f"effective noises must be positive, got lam = {lam}, lam' = {lam_prime}"
        )
    alpha = tau * tau
    beta = 2.0 * tau
    chi = beta / alpha * math.sqrt((beta + lam) * (beta + lam_prime))
    nu1 = math.sqrt((tau + lam) * (tau + lam_prime)) / tau
    rate = (
        math.log2(8.0 * tau * mu ** (xi - 1.0)
                  / (E_SQUARED * chi ** xi * math.sqrt(lam * lam_prime)))
        + entropy_h(nu1)
    )
    i_ab = mutual_information(mu, chi)
    return KeyRateReport(
        rate=rate, i_ab=i_ab, i_ea=xi * i_ab - rate, chi=chi,
        secure=rate > 0.0, formula_tag="symmetric-closed", nu1=nu1,
    )


def key_rate_closed_asym(
    protocol: ProtocolParams, link: LinkPair, lam: float, lam_prime: float
) -> KeyRateReport:
    """Closed form for asymmetric links:

    R = log2(2 beta mu^(xi-1) / (e |dtau| chi^xi))
        + h(nu) - h(sqrt(lam lam') / |dtau|).
    """
    dt = link.delta_tau
    if dt < SYMMETRIC_TAU_TOL:
        raise SymmetricDegenerateError(
            "asymmetric closed form requires tau_a != tau_b"
        )
    mu, xi = protocol.mu, protocol.xi
    prod = lam * lam_prime
    if prod < 0.0:
        raise DomainError(f"lam * lam' = {prod} < 0")
    nfac = (link.tau_a + lam) * (link.tau_a + lam_prime)
    if nfac < 0.0:
        raise DomainError("noise symplectic value undefined")
    bfac = (link.beta + lam) * (link.beta + lam_prime)
    if bfac <= 0.0:
        raise DomainError("equivalent noise undefined")
    chi = link.beta / link.alpha * math.sqrt(bfac)
    nu = math.sqrt(nfac) / link.tau_b
    rate = (
        math.log2(2.0 * link.beta * mu ** (xi - 1.0) / (math.e * dt * chi ** xi))
        + entropy_h(nu)
        - entropy_h(math.sqrt(prod) / dt)
    )
    i_ab = mutual_information(mu, chi)
    return KeyRateReport(
        rate=rate, i_ab=i_ab, i_ea=xi * i_ab - rate, chi=chi,
        secure=rate > 0.0, formula_tag="asymmetric-closed", nu=nu,
    )


def key_rate_min_thermal(
    protocol: ProtocolParams, link: LinkPair, omega_a: float, omega_b: float
) -> KeyRateReport:
    """Worst-case rate when the thermal noises are known.

    The minimum over all physical correlations sits on the
    anticorrelation bisector at the physicality boundary, i.e. at
    lam = lam' = lam_opt = kappa + u |g|_max.  Symmetric branch:

    R = h((tau + lam_opt)/tau) + log2(8 tau mu^(xi-1) / (e^2 chi_opt^xi lam_opt)),
    chi_opt = 2 (2 tau + lam_opt) / tau.

    The asymmetric branch is written so that it coincides exactly with the
    asymmetric closed form evaluated at lam = lam' = lam_opt (the
    (tau_a + tau_b)^(1-xi) factor below is required for that identity and
    for the analytic value to lower-bound the brute-force grid):

    R = h((tau_a + lam_opt)/tau_b) - h(lam_opt/|dtau|)
        + log2(2 alpha^xi beta^(1-xi) mu^(xi-1) / (e |dtau| (beta + lam_opt)^xi)).
    """
    gm = g_max(omega_a, omega_b)
    kappa = (1.0 - link.tau_a) * omega_a + (1.0 - link.tau_b) * omega_b
    lam_opt = kappa + link.u * gm
    mu, xi = protocol.mu, protocol.xi
    if link.is_symmetric:
        tau = 0.5 * (link.tau_a + link.tau_b)
        if lam_opt == 0.0:  # lossless links: adversary decoupled
            i_ab = mutual_information(mu, 4.0)
            rate = xi * i_ab
            return KeyRateReport(
                rate=rate, i_ab=i_ab, i_ea=0.0, chi=4.0,
                secure=rate > 0.0, formula_tag="min-thermal-symmetric", nu1=1.0,
            )
        chi_opt = 2.0 * (2.0 * tau + lam_opt) / tau
        nu1 = (tau + lam_opt) / tau
        rate = entropy_h(nu1) + math.log2(
            8.0 * tau * mu ** (xi - 1.0) / (E_SQUARED * chi_opt ** xi * lam_opt)
        )
        i_ab = mutual_information(mu, chi_opt)
        return KeyRateReport(
            rate=rate, i_ab=i_ab, i_ea=xi * i_ab - rate, chi=chi_opt,
            secure=rate > 0.0, formula_tag="min-thermal-symmetric", nu1=nu1,
        )
    dt = link.delta_tau
    if lam_opt <= dt * (1.0 - 1e-12):
        raise DomainError(
            f"lam_opt = {lam_opt} <= |dtau| = {dt}: rate formula undefined "
            "in this regime"
        )
    alpha, beta = link.alpha, link.beta
    nu = (link.tau_a + lam_opt) / link.tau_b
    chi = beta * (beta + lam_opt) / alpha
    rate = (
        entropy_h(nu)
        - entropy_h(lam_opt / dt)
        + math.log2(
            2.0 * alpha ** xi * beta ** (1.0 - xi) * mu ** (xi - 1.0)
            / (math.e * dt * (beta + lam_opt) ** xi)
        )
    )
    i_ab = mutual_information(mu, chi)
    return KeyRateReport(
        rate=rate, i_ab=i_ab, i_ea=xi * i_ab - rate, chi=chi,
        secure=rate > 0.0, formula_tag="min-thermal-asymmetric", nu=nu,
    )


def key_rate_min_chi(
    protocol: ProtocolParams, link: LinkPair, chi: float
) -> KeyRateReport:
    """Worst-case rate when the equivalent noise chi is known.

    Symmetric branch (pole at chi = 4):

    R = h((chi - 2)/2) + log2(16 mu^(xi-1) / (e^2 chi^xi (chi - 4))).

    Asymmetric branch:

    R = log2(2 beta mu^(xi-1) / (e |dtau| chi^xi))
        + h(tau_a chi / beta - 1) - h((alpha chi - beta^2) / (|dtau| beta)).
    """
    mu, xi = protocol.mu, protocol.xi
    if link.is_symmetric:
        if chi <= 4.0:
            raise DomainError(
                f"chi = {chi} <= 4: symmetric rate formula has a pole at 4"
            )
        nu1 = (chi - 2.0) / 2.0
        rate = entropy_h(nu1) + math.log2(
            16.0 * mu ** (xi - 1.0) / (E_SQUARED * chi ** xi * (chi - 4.0))
        )
        i_ab = mutual_information(mu, chi)
        return KeyRateReport(
            rate=rate, i_ab=i_ab, i_ea=xi * i_ab - rate, chi=chi,
            secure=rate > 0.0, formula_tag="min-chi-symmetric", nu1=nu1,
        )
    alpha, beta, dt = link.alpha, link.beta, link.delta_tau
    if chi < beta * beta / alpha:
        raise DomainError(
            f"chi = {chi} below the loss floor beta^2/alpha = {beta * beta / alpha}"
        )
    nu = link.tau_a * chi / beta - 1.0
    x2 = (alpha * chi - beta * beta) / (dt * beta)
    rate = (
        math.log2(2.0 * beta * mu ** (xi - 1.0) / (math.e * dt * chi ** xi))
        + entropy_h(nu)
        - entropy_h(x2)
    )
    i_ab = mutual_information(mu, chi)
    return KeyRateReport(
        rate=rate, i_ab=i_ab, i_ea=xi * i_ab - rate, chi=chi,
        secure=rate > 0.0, formula_tag="min-chi-asymmetric", nu=nu, nu2=x2,
    )
