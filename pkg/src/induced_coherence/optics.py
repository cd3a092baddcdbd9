"""Linear-optical elements acting on :class:`~induced_coherence.fock.FockState`.

Beam splitters and the idler-overlap channel are both implemented as linear
substitutions of creation operators, expanded exactly term by term.  The beam
splitter convention is ``a^dag -> t a^dag + i r b^dag``, ``b^dag -> t b^dag + i r a^dag``.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Mapping
from dataclasses import dataclass

from .errors import DomainError
from .fock import FockState, ModeLike


@dataclass(frozen=True)
class BeamSplitterSpec:
    mode_a: ModeLike
    mode_b: ModeLike
    transmission_amplitude: float = 1 / math.sqrt(2)

    def __post_init__(self):
        t = self.transmission_amplitude
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"transmission amplitude must lie in [0, 1], got {t}")
        if self.mode_a == self.mode_b:
            raise DomainError("beam splitter needs two distinct modes")

    @property
    def reflection_amplitude(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.transmission_amplitude ** 2))

    @classmethod
    def from_reflectivity(cls, mode_a: ModeLike, mode_b: ModeLike, reflectivity: float):
        """Build from the intensity reflectivity R (e.g. 0.4 for a 60:40 splitter)."""
        if not 0.0 <= reflectivity <= 1.0:
            raise DomainError(f"reflectivity must lie in [0, 1], got {reflectivity}")
        return cls(mode_a, mode_b, math.sqrt(1.0 - reflectivity))


@dataclass(frozen=True)
class OverlapSpec:
    """Imperfect transfer of ``source_mode`` onto ``target_mode``.

    ``gamma`` is the amplitude overlap; the orthogonal remainder goes to
    ``ancilla_mode``, which must be empty when the channel is applied.
    """

    source_mode: ModeLike
    target_mode: ModeLike
    gamma: float
    ancilla_mode: ModeLike

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise DomainError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.ancilla_mode in (self.source_mode, self.target_mode):
            raise DomainError("ancilla mode must differ from source and target")
        if self.source_mode == self.target_mode:
            raise DomainError("source and target modes must differ")


def linear_substitution(state: FockState, rules: Mapping[int, Mapping[int, complex]]) -> FockState:
    """Replace ``a_j^dag -> sum_k c_jk a_k^dag`` for every ``j`` in ``rules``.

    Each basis term ``prod (a_j^dag)^n_j / sqrt(n_j!) |0>`` is expanded as a
    polynomial in creation operators and folded back into normalized kets.
    Photon number is conserved, so capacity is never exceeded.
    """
    out: dict[tuple[int, ...], complex] = {}
    for occ, amp in state.terms.items():
        base = tuple(0 if j in rules else n for j, n in enumerate(occ))
        poly = {base: amp / math.sqrt(math.prod(math.factorial(n) for n in occ))}
        for j, rule in rules.items():
            for _ in range(occ[j]):
                nxt: dict[tuple[int, ...], complex] = {}
                for mono, c in poly.items():
                    for k, ck in rule.items():
                        if ck == 0:
                            continue
                        m = mono[:k] + (mono[k] + 1,) + mono[k + 1:]
                        nxt[m] = nxt.get(m, 0j) + c * ck
                poly = nxt
        for mono, c in poly.items():
            out[mono] = out.get(mono, 0j) + c * math.sqrt(math.prod(math.factorial(n) for n in mono))
    return state._with_terms(out)


def apply_phase(state: FockState, mode: ModeLike, phi: float) -> FockState:
    """Multiply every term by ``exp(i n phi)`` where n is the occupation of ``mode``."""
    j = state.registry.index(mode)
    return state._with_terms({occ: amp * cmath.exp(1j * occ[j] * phi) for occ, amp in state.terms.items()})


def apply_beam_splitter(state: FockState, spec: BeamSplitterSpec) -> FockState:
    reg = state.registry
    a, b = reg.index(spec.mode_a), reg.index(spec.mode_b)
    if a == b:
        raise DomainError("beam splitter needs two distinct modes")
    t, r = spec.transmission_amplitude, spec.reflection_amplitude
    return linear_substitution(state, {a: {a: t, b: 1j * r}, b: {b: t, a: 1j * r}})


def apply_overlap(state: FockState, spec: OverlapSpec) -> FockState:
    """Rewrite ``a_src^dag -> gamma a_tgt^dag + sqrt(1 - gamma^2) a_anc^dag``.

    This is norm preserving whenever the target mode is empty in every term
    carrying source photons.  When both are occupied (the two-pair
    cross term, for instance) photons merging into one mode pick up the
    bosonic factor and the output must be renormalized by the caller.
    """
    reg = state.registry
    src, tgt, anc = reg.index(spec.source_mode), reg.index(spec.target_mode), reg.index(spec.ancilla_mode)
    if len({src, tgt, anc}) != 3:
        raise DomainError("overlap needs three distinct modes")
    if any(occ[anc] for occ in state.terms):
        raise DomainError(f"ancilla mode {reg.modes[anc].label!r} must be unoccupied")
    g = spec.gamma
    s = math.sqrt(max(0.0, 1.0 - g * g))
    return linear_substitution(state, {src: {tgt: g, anc: s}})


def stimulated_gain_ratio(seed_mean_photons: float) -> float:
    """Unblocked/blocked pair-emission rate with a seeded idler of mean occupancy mu.

    To first order in the parametric gain the emission rate into a mode holding
    n photons scales as n + 1; averaged over the seed this is ``1 + mu``.
    """
    mu = float(seed_mean_photons)
    if not mu >= 0 or math.isinf(mu):
        raise DomainError(f"seed mean photon number must be finite and >= 0, got {seed_mean_photons}")
    return 1.0 + mu


def stimulated_pair_gain_ratio(seed_mean_photons: float) -> float:
    """Two-photon analogue of :func:`stimulated_gain_ratio` for a Poissonian seed.

    Emitting two photons into a mode holding n photons scales as
    ``(n + 1)(n + 2) / 2``; the Poisson average is ``1 + 2 mu + mu^2 / 2``.
    """
    mu = float(seed_mean_photons)
    if not mu >= 0 or math.isinf(mu):
        raise DomainError(f"seed mean photon number must be finite and >= 0, got {seed_mean_photons}")
    return 1.0 + 2.0 * mu + 0.5 * mu * mu
