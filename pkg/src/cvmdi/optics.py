"""Classical mean-field simulation of the plug-and-play interferometer.

Two pulses leave the relay splitter, retro-reflect off the far mirrors of
both parties and interfere back at the relay.  Polarization is tracked as
a discrete H/V label (the layout keeps every pulse in a definite linear
polarization), phase as an accumulated real number and the field as a
complex mean amplitude.  No quantum noise is sampled: the attack model
lives in the covariance-matrix modules, while this module certifies the
routing and the phase bookkeeping behind the drift-immunity claim.

Routing rule: a polarizing splitter transmits H and reflects V; a Faraday
mirror retro-reflects and swaps H and V.  Each path step names the
splitter port the intended layout continues through, so any mutation of
the component graph that sends a pulse out the wrong port raises
:class:`RoutingError`.

Fiber drifts are static per round trip by default (slow-drift regime).
The ``drift_rate_*`` options add a per-pass linear phase ramp, indexed by
the pulse's segment-traversal slot (0..3), to quantify the residual error
when that assumption is relaxed; only the differential rate between the
two fibers survives in the relative phase.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

H = "H"
V = "V"

ALIGNMENT_TOL = 1e-12
"""Maximum tolerated relative-phase deviation for an intact scheme."""

CONTROL_THRESHOLD = 1e-3
"""A broken path must exceed this deviation for nearly all trials."""


class RoutingError(RuntimeError):
    """A pulse reached a splitter port in a polarization the layout forbids."""


@dataclass
class Pulse:
    polarization: str
    phase: float = 0.0
    amplitude: complex = 1.0 + 0.0j
    trace: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class SchemeConfig:
    """One-way fiber drifts, party encodings and the fixed pi/2 offset
    applied at Bob's preparation stage (required by the dual-homodyne
    measurement convention; the layout does not work with any other
    value, so it is validated rather than tunable)."""

    phi_fiber_a: float = 0.0
    phi_fiber_b: float = 0.0
    alice_encoding: complex = 1.0 + 0.0j
    bob_encoding: complex = 1.0 + 0.0j
    bob_extra_phase: float = math.pi / 2.0
    drift_rate_a: float = 0.0
    drift_rate_b: float = 0.0

    def __post_init__(self) -> None:
        if self.bob_extra_phase != math.pi / 2.0:
            raise ValueError("bob_extra_phase is fixed to pi/2 by the protocol")
        if self.alice_encoding == 0 or self.bob_encoding == 0:
            raise ValueError("encodings must be nonzero mean fields")


@dataclass(frozen=True)
class BsmOutcome:
    x_minus: float
    p_plus: float
    gamma: complex


@dataclass(frozen=True)
class Splitter:
    name: str
    port: str  # "transmit" | "reflect": the port the intended path uses

    def apply(self, pulse: Pulse) -> None:
        routed = "transmit" if pulse.polarization == H else "reflect"
        if routed != self.port:
            raise RoutingError(
                f"{self.name}: {pulse.polarization}-polarized pulse exits the "
                f"{routed} port but the path continues via {self.port}"
            )
        pulse.trace.append(self.name)


@dataclass(frozen=True)
class Fiber:
    name: str
    phase: float

    def apply(self, pulse: Pulse) -> None:
        pulse.phase += self.phase
        pulse.amplitude *= cmath.exp(1j * self.phase)
        pulse.trace.append(self.name)


@dataclass(frozen=True)
class FaradayMirror:
    name: str
    flip: bool = True  # flip=False models a broken/plain mirror

    def apply(self, pulse: Pulse) -> None:
        if self.flip:
            pulse.polarization = V if pulse.polarization == H else H
        pulse.trace.append(self.name)


@dataclass(frozen=True)
class Encoder:
    name: str
    value: complex
    extra_phase: float = 0.0

    def apply(self, pulse: Pulse) -> None:
        pulse.phase += self.extra_phase + cmath.phase(self.value)
        pulse.amplitude *= self.value * cmath.exp(1j * self.extra_phase)
        pulse.trace.append(self.name)


PathStep = Splitter | Fiber | FaradayMirror | Encoder


def left_path(config: SchemeConfig) -> list[PathStep]:
    """Relay -> fiber A -> mirror A -> back -> cross link -> fiber B ->
    mirror B (Bob encodes, + pi/2) -> back to the relay splitter."""
    fa, fb = config.phi_fiber_a, config.phi_fiber_b
    ra, rb = config.drift_rate_a, config.drift_rate_b
    return [
        Splitter("pbs_a", "transmit"),
        Fiber("fiber_a", fa + ra * 0),
        FaradayMirror("fm_a"),
        Fiber("fiber_a", fa + ra * 1),
        Splitter("pbs_a", "reflect"),
        Splitter("pbs_b", "reflect"),
        Fiber("fiber_b", fb + rb * 2),
        FaradayMirror("fm_b"),
        Encoder("encode_bob", config.bob_encoding, config.bob_extra_phase),
        Fiber("fiber_b", fb + rb * 3),
        Splitter("pbs_b", "transmit"),
    ]


def right_path(config: SchemeConfig, skip_fiber_a: bool = False) -> list[PathStep]:
    """Mirror image of the left path: fiber B first, Alice encodes.

    ``skip_fiber_a`` builds the deliberately broken single-fiber control
    (the A-side excursion happens without traversing fiber A), which makes
    the relative phase drift-sensitive.
    """
    fa, fb = config.phi_fiber_a, config.phi_fiber_b
    ra, rb = config.drift_rate_a, config.drift_rate_b
    steps: list[PathStep] = [
        Splitter("pbs_b", "transmit"),
        Fiber("fiber_b", fb + rb * 0),
        FaradayMirror("fm_b"),
        Fiber("fiber_b", fb + rb * 1),
        Splitter("pbs_b", "reflect"),
        Splitter("pbs_a", "reflect"),
        Fiber("fiber_a", fa + ra * 2),
        FaradayMirror("fm_a"),
        Encoder("encode_alice", config.alice_encoding),
        Fiber("fiber_a", fa + ra * 3),
        Splitter("pbs_a", "transmit"),
    ]
    if skip_fiber_a:
        steps = [s for s in steps if not (isinstance(s, Fiber) and s.name == "fiber_a")]
    return steps


def run_path(steps: list[PathStep], label: str = "pulse") -> Pulse:
    """Propagate an H-polarized unit pulse through a step sequence."""
    pulse = Pulse(polarization=H)
    for step in steps:
        step.apply(pulse)
    pulse.trace.append(f"relay_bs[{label}]")
    return pulse


def propagate(config: SchemeConfig) -> tuple[Pulse, Pulse]:
    """Run both pulses through the intact layout.

    Both return H-polarized with propagation phase 2 phi_a + 2 phi_b (plus
    drift-ramp terms); their relative phase is pi/2 plus the encoding
    phase difference, independent of the fiber drifts.
    """
    left = run_path(left_path(config), "left")
    right = run_path(right_path(config), "right")
    return left, right


def _wrap(angle: float) -> float:
    return math.remainder(angle, 2.0 * math.pi)


def relative_phase(left: Pulse, right: Pulse) -> float:
    """Inter-arm phase difference wrapped to (-pi, pi]."""
    return _wrap(left.phase - right.phase)


def expected_relative_phase(config: SchemeConfig) -> float:
    return _wrap(
        config.bob_extra_phase
        + cmath.phase(config.bob_encoding)
        - cmath.phase(config.alice_encoding)
    )


def bsm_measure(alpha_a: complex, alpha_b: complex) -> BsmOutcome:
    """Dual-homodyne mean values: x- = (x_A - x_B)/sqrt(2),
    p+ = (p_A + p_B)/sqrt(2), gamma = (x- + i p+)/sqrt(2)."""
    x_minus = (alpha_a.real - alpha_b.real) / math.sqrt(2.0)
    p_plus = (alpha_a.imag + alpha_b.imag) / math.sqrt(2.0)
    return BsmOutcome(
        x_minus=x_minus, p_plus=p_plus, gamma=(x_minus + 1j * p_plus) / math.sqrt(2.0)
    )


@dataclass(frozen=True)
class AlignmentReport:
    trials: int
    seed: int
    max_phase_error: float
    passed: bool
    control_fail_fraction: float
    control_passed: bool

    @property
    def ok(self) -> bool:
        return self.passed and self.control_passed


def check_self_alignment(trials: int = 10000, seed: int = 0) -> AlignmentReport:
    """Monte-Carlo certificate of drift immunity.

    Runs the intact layout over random fiber drifts and encodings and
    records the worst deviation of the relative phase from pi/2 plus the
    encoding difference (must stay within ``ALIGNMENT_TOL``).  A control
    with the single-fiber broken path must exceed ``CONTROL_THRESHOLD``
    deviation in at least 99% of the same trials.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    max_err = 0.0
    control_failures = 0
    for _ in range(trials):
        phi_a, phi_b = rng.uniform(0.0, 2.0 * math.pi, size=2)
        enc_a = rng.uniform(0.5, 2.0) * cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        enc_b = rng.uniform(0.5, 2.0) * cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        config = SchemeConfig(
            phi_fiber_a=phi_a, phi_fiber_b=phi_b,
            alice_encoding=enc_a, bob_encoding=enc_b,
        )
        expected = expected_relative_phase(config)
        left, right = propagate(config)
        err = abs(_wrap(relative_phase(left, right) - expected))
        max_err = max(max_err, err)
        broken = run_path(right_path(config, skip_fiber_a=True), "right-broken")
        broken_err = abs(_wrap(relative_phase(left, broken) - expected))
        if broken_err > CONTROL_THRESHOLD:
            control_failures += 1
    return AlignmentReport(
        trials=trials,
        seed=seed,
        max_phase_error=max_err,
        passed=max_err <= ALIGNMENT_TOL,
        control_fail_fraction=control_failures / trials,
        control_passed=control_failures / trials >= 0.99,
    )
