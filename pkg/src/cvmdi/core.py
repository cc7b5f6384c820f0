"""Shared domain types and Gaussian-attack algebra.

Conventions used throughout the package:

- All variances are in shot-noise units (SNU): vacuum noise = 1.
- Logarithms are base 2; rates come out in bits per relay use.
- The adversary injects a two-mode Gaussian ancilla described by the 4x4
  covariance matrix with diagonal blocks ``omega_a * I``, ``omega_b * I``
  and off-diagonal block ``diag(g, g_prime)``.  Physicality of that matrix
  (positive definiteness plus smallest symplectic eigenvalue >= 1) defines
  the admissible attack domain.

All functions are pure; the dataclasses are frozen and safe to share
between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

H_CLAMP_TOL = 1e-12
"""Arguments of entropy_h within this slack below 1 are clamped to 1."""

PHYSICALITY_TOL = 1e-12
"""Slack on nu_minus >= 1 when testing physicality."""

BISECTION_TOL = 1e-12
"""Absolute tolerance of the g_max bisection."""

SYMMETRIC_TAU_TOL = 1e-9
"""Below this |tau_a - tau_b| a link pair is treated as symmetric."""

LOG2E = math.log2(math.e)


class DomainError(ValueError):
    """A quantity left the mathematical domain of a rate or entropy formula."""


class NonphysicalStateError(DomainError):
    """A covariance matrix is not a valid Gaussian quantum state."""


class SymmetricDegenerateError(DomainError):
    """An asymmetric-only formula was evaluated with tau_a == tau_b."""


class EmptyDomainError(DomainError):
    """A search domain contains no admissible point."""


@dataclass(frozen=True)
class ProtocolParams:
    """Trusted-party knobs: reconciliation efficiency ``xi`` (dimensionless,
    in (0, 1]), Gaussian modulation variance ``phi`` (SNU, > 0) and excess
    noise ``epsilon`` (SNU, >= 0).  Defaults reproduce the reference
    simulation parameter set."""

    xi: float = 0.97
    phi: float = 60.0
    epsilon: float = 0.01

    def __post_init__(self) -> None:
        if not 0.0 < self.xi <= 1.0:
            raise ValueError(f"xi must be in (0, 1], got {self.xi}")
        if self.phi <= 0.0:
            raise ValueError(f"phi must be > 0, got {self.phi}")
        if self.epsilon < 0.0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")

    @property
    def mu(self) -> float:
        """Coherent-state variance mu = phi + 1 (SNU)."""
        return self.phi + 1.0


@dataclass(frozen=True)
class LinkPair:
    """Channel transmissivities of the two links into the relay."""

    tau_a: float
    tau_b: float

    def __post_init__(self) -> None:
        for name, tau in (("tau_a", self.tau_a), ("tau_b", self.tau_b)):
            if not 0.0 < tau <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {tau}")

    @property
    def alpha(self) -> float:
        return self.tau_a * self.tau_b

    @property
    def beta(self) -> float:
        return self.tau_a + self.tau_b

    @property
    def u(self) -> float:
        """Loss-coupling factor 2 sqrt((1 - tau_a)(1 - tau_b))."""
        return 2.0 * math.sqrt((1.0 - self.tau_a) * (1.0 - self.tau_b))

    @property
    def delta_tau(self) -> float:
        return abs(self.tau_a - self.tau_b)

    @property
    def is_symmetric(self) -> bool:
        return self.delta_tau < SYMMETRIC_TAU_TOL


@dataclass(frozen=True)
class AncillaState:
    """Parameters of the adversary's two-mode ancilla covariance:
    variances ``omega_a, omega_b`` (SNU, >= 1) and quadrature correlations
    ``g`` (position block) and ``g_prime`` (momentum block)."""

    omega_a: float
    omega_b: float
    g: float
    g_prime: float

    def __post_init__(self) -> None:
        for name, w in (("omega_a", self.omega_a), ("omega_b", self.omega_b)):
            if w < 1.0:
                raise ValueError(f"{name} must be >= 1 SNU, got {w}")


@dataclass(frozen=True)
class DerivedNoise:
    """Noise quantities induced by a (LinkPair, AncillaState) pair.

    ``kappa`` is the total back-injected thermal noise, ``lam``/``lam_prime``
    the effective noises of the two quadrature branches, ``delta`` their
    mean, and ``chi`` the equivalent input-referred noise."""

    kappa: float
    lam: float
    lam_prime: float
    delta: float
    chi: float


@dataclass(frozen=True)
class AttackCoords:
    """Rotated correlation coordinates: ``d`` is the distance of
    ``(g, g_prime)`` from the anticorrelation bisector g = -g', ``d_prime``
    the signed half-sum, ``l`` the bisector projection.  ``y`` is the
    monotonicity variable of the proof checks; its definition depends on
    the knowledge model, so it is optional here and reported alongside the
    sampled profiles instead."""

    d: float
    d_prime: float
    l: float
    y: float | None = None


@dataclass(frozen=True)
class SymplecticPair:
    """The two symplectic eigenvalues of a two-mode covariance, sorted."""

    nu_minus: float
    nu_plus: float


def entropy_h(x: float) -> float:
    """Thermal-spectrum entropy ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2).

    Continuously extended by h(1) = 0; arguments within ``H_CLAMP_TOL``
    below 1 are clamped to 1 so rounding at physical boundaries does not
    raise.  Raises :class:`DomainError` below the clamp window, which
    signals a nonphysical intermediate quantity.
    """
    if x < 1.0 - H_CLAMP_TOL:
        raise DomainError(f"entropy_h argument {x!r} < 1: nonphysical value")
    if x <= 1.0:
        return 0.0
    a = (x + 1.0) / 2.0
    b = (x - 1.0) / 2.0
    return a * math.log2(a) - b * math.log2(b)


def log_ratio_g(x: float) -> float:
    """log2((x+1)/(x-1)) for x > 1; strictly decreasing, pole at x = 1."""
    if x <= 1.0:
        raise DomainError(f"log_ratio_g argument {x!r} <= 1")
    return math.log2((x + 1.0) / (x - 1.0))


def symplectic_spectrum(ancilla: AncillaState) -> SymplecticPair:
    """Symplectic eigenvalues of the two-mode ancilla covariance.

    Uses the block invariants Delta = omega_a^2 + omega_b^2 + 2 g g' and
    det = (omega_a omega_b - g^2)(omega_a omega_b - g'^2):
    nu_pm^2 = (Delta +- sqrt(Delta^2 - 4 det)) / 2.
    """
    wa, wb, g, gp = ancilla.omega_a, ancilla.omega_b, ancilla.g, ancilla.g_prime
    m = wa * wb
    if m <= g * g or m <= gp * gp:
        raise NonphysicalStateError(
            f"covariance not positive definite: omega_a*omega_b = {m} "
            f"vs g = {g}, g_prime = {gp}"
        )
    delta = wa * wa + wb * wb + 2.0 * g * gp
    det = (m - g * g) * (m - gp * gp)
    disc = delta * delta - 4.0 * det
    if disc < -1e-9 * max(1.0, delta * delta):
        raise NonphysicalStateError("complex symplectic spectrum")
    root = math.sqrt(max(disc, 0.0))
    return SymplecticPair(
        nu_minus=math.sqrt((delta - root) / 2.0),
        nu_plus=math.sqrt((delta + root) / 2.0),
    )


def is_physical(ancilla: AncillaState) -> bool:
    """True iff the ancilla covariance is a bona fide Gaussian state:
    both quadrature blocks positive definite and nu_minus >= 1 (within
    ``PHYSICALITY_TOL``).  Never raises."""
    wa, wb, g, gp = ancilla.omega_a, ancilla.omega_b, ancilla.g, ancilla.g_prime
    m = wa * wb
    if m - g * g <= 0.0 or m - gp * gp <= 0.0:
        return False
    return symplectic_spectrum(ancilla).nu_minus >= 1.0 - PHYSICALITY_TOL


def _nu_minus_anticorrelated(omega_a: float, omega_b: float, g: float) -> float:
    """nu_minus of the ancilla (g, -g) through the factored discriminant
    (omega_a - omega_b)^2 ((omega_a + omega_b)^2 - 4 g^2), which stays
    exact when the variances coincide."""
    s = (omega_a + omega_b) ** 2 - 4.0 * g * g
    if s < 0.0:
        return 0.0
    val = 0.5 * (
        omega_a * omega_a + omega_b * omega_b - 2.0 * g * g
        - abs(omega_a - omega_b) * math.sqrt(s)
    )
    return math.sqrt(max(val, 0.0))


def g_max(omega_a: float, omega_b: float) -> float:
    """Largest g >= 0 such that the anticorrelated ancilla (g, -g) stays
    physical, located by bisection to ``BISECTION_TOL``.

    On the anticorrelation line nu_minus decreases strictly from
    min(omega_a, omega_b) at g = 0 to 0 at the positivity bound
    sqrt(omega_a * omega_b), so the boundary is unique.  The bisection
    tests nu_minus >= 1 strictly (no physicality slack) so vacuum ancillas
    yield exactly 0.
    """
    if omega_a < 1.0 or omega_b < 1.0:
        raise ValueError("ancilla variances must be >= 1 SNU")
    if min(omega_a, omega_b) == 1.0:
        # nu_minus(0) = min(omega) and decreases strictly, so the boundary
        # sits at exactly 0; bisecting would stall on sub-ulp rounding.
        return 0.0
    bound = math.sqrt(omega_a * omega_b)

    def physical(g: float) -> bool:
        return g < bound and _nu_minus_anticorrelated(omega_a, omega_b, g) >= 1.0

    lo = 0.0
    hi = bound
    if not physical(lo):  # unreachable for omega >= 1; kept as a guard
        return 0.0
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if physical(mid):
            lo = mid
        else:
            hi = mid
    return lo


def derive_noise(link: LinkPair, ancilla: AncillaState) -> DerivedNoise:
    """Noise algebra induced by a link/ancilla pair:

    kappa = (1 - tau_a) omega_a + (1 - tau_b) omega_b,
    lam = kappa - u g,  lam' = kappa + u g',  delta = kappa - u l,
    chi = (beta / alpha) sqrt((beta + lam)(beta + lam')).
    """
    kappa = (1.0 - link.tau_a) * ancilla.omega_a + (1.0 - link.tau_b) * ancilla.omega_b
    u = link.u
    lam = kappa - u * ancilla.g
    lam_prime = kappa + u * ancilla.g_prime
    l = (ancilla.g - ancilla.g_prime) / 2.0
    delta = kappa - u * l
    fa = link.beta + lam
    fb = link.beta + lam_prime
    if fa <= 0.0 or fb <= 0.0:
        raise DomainError(
            f"equivalent noise undefined: beta + lam = {fa}, beta + lam' = {fb}"
        )
    chi = link.beta / link.alpha * math.sqrt(fa * fb)
    return DerivedNoise(kappa=kappa, lam=lam, lam_prime=lam_prime, delta=delta, chi=chi)


def chi_equivalent(link: LinkPair, epsilon: float) -> float:
    """Equivalent input-referred noise 2 beta / alpha + epsilon of a lossy
    link pair with excess noise epsilon; always >= beta^2 / alpha."""
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    return 2.0 * link.beta / link.alpha + epsilon


def attack_coords(g: float, g_prime: float) -> AttackCoords:
    """Rotate correlations into bisector coordinates: d' = (g + g')/2,
    l = (g - g')/2, d = |g + g'| / sqrt(2).  Intended for the sector
    g + g' >= 0 (the other sector is its mirror image)."""
    return AttackCoords(
        d=abs(g + g_prime) / math.sqrt(2.0),
        d_prime=(g + g_prime) / 2.0,
        l=(g - g_prime) / 2.0,
    )


def coords_to_correlations(d_prime: float, l: float) -> tuple[float, float]:
    """Inverse of :func:`attack_coords`: g = d' + l, g' = d' - l."""
    return d_prime + l, d_prime - l
