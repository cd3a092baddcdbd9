"""Sparse multimode bosonic Fock states.

A :class:`FockState` stores a map ``occupation tuple -> complex amplitude`` over
the modes of a :class:`ModeRegistry`.  States are immutable; every operation
returns a new state.  The total photon number of every stored term is bounded by
``n_max`` and exceeding it raises :class:`CapacityError` rather than truncating.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Union

from .errors import CapacityError, ConfigError, DomainError, RegistryMismatchError

DEFAULT_N_MAX = 6
PRUNE_THRESHOLD = 1e-14

Occupation = tuple[int, ...]


@dataclass(frozen=True)
class ModeId:
    index: int
    label: str
    wavelength: float | None = None  # nm

    def __post_init__(self):
        if self.wavelength is not None and not self.wavelength > 0:
            raise ConfigError(f"mode {self.label!r}: wavelength must be > 0, got {self.wavelength}")


ModeLike = Union[ModeId, str, int]


@dataclass(frozen=True)
class ModeRegistry:
    """Ordered set of named optical modes."""

    modes: tuple[ModeId, ...]

    def __post_init__(self):
        if not self.modes:
            raise ConfigError("mode registry must contain at least one mode")
        labels = [m.label for m in self.modes]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"mode labels must be unique, got {labels}")
        for i, m in enumerate(self.modes):
            if m.index != i:
                raise ConfigError(f"mode {m.label!r} has index {m.index}, expected {i}")

    @classmethod
    def from_labels(cls, labels: Iterable[str], wavelengths: Mapping[str, float] | None = None):
        wavelengths = wavelengths or {}
        labels = list(labels)
        unknown = set(wavelengths) - set(labels)
        if unknown:
            raise ConfigError(f"wavelengths given for unknown modes {sorted(unknown)}")
        return cls(tuple(ModeId(i, lab, wavelengths.get(lab)) for i, lab in enumerate(labels)))

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __getitem__(self, key: ModeLike) -> ModeId:
        return self.modes[self.index(key)]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(m.label for m in self.modes)

    def index(self, mode: ModeLike) -> int:
        """Resolve a mode given as ModeId, label or integer index."""
        if isinstance(mode, ModeId):
            if mode.index < len(self.modes) and self.modes[mode.index] == mode:
                return mode.index
            raise DomainError(f"mode {mode} is not registered")
        if isinstance(mode, str):
            for m in self.modes:
                if m.label == mode:
                    return m.index
            raise DomainError(f"unknown mode label {mode!r}; registered: {self.labels}")
        if isinstance(mode, int) and 0 <= mode < len(self.modes):
            return mode
        raise DomainError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class FockState:
    """Immutable sparse superposition of occupation-number basis vectors."""

    registry: ModeRegistry
    terms: Mapping[Occupation, complex] = field(default_factory=dict)
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        if self.n_max < 0:
            raise ConfigError(f"n_max must be non-negative, got {self.n_max}")
        width = len(self.registry)
        clean = {}
        for occ, amp in self.terms.items():
            occ = tuple(int(n) for n in occ)
            if len(occ) != width:
                raise DomainError(f"occupation {occ} does not match registry of {width} modes")
            if any(n < 0 for n in occ):
                raise DomainError(f"negative occupation in {occ}")
            if sum(occ) > self.n_max:
                raise CapacityError(f"occupation {occ} exceeds n_max={self.n_max}")
            amp = complex(amp)
            if abs(amp) >= PRUNE_THRESHOLD:
                clean[occ] = clean.get(occ, 0j) + amp
        clean = {k: v for k, v in clean.items() if abs(v) >= PRUNE_THRESHOLD}
        object.__setattr__(self, "terms", MappingProxyType(clean))

    def __len__(self) -> int:
        return len(self.terms)

    def amplitude(self, occupation: Iterable[int]) -> complex:
        return self.terms.get(tuple(occupation), 0j)

    def labelled(self, occupation: Mapping[str, int]) -> complex:
        """Amplitude of the basis vector given as ``{label: count}``; other modes empty."""
        occ = [0] * len(self.registry)
        for label, n in occupation.items():
            occ[self.registry.index(label)] = n
        return self.amplitude(occ)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.terms.values()))

    def normalize(self) -> FockState:
        nrm = self.norm()
        if nrm == 0:
            raise DomainError("cannot normalize the zero vector")
        return self._with_terms({k: v / nrm for k, v in self.terms.items()})

    def scale(self, factor: complex) -> FockState:
        return self._with_terms({k: v * factor for k, v in self.terms.items()})

    def __add__(self, other: FockState) -> FockState:
        _check_same(self, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0j) + v
        return self._with_terms(out)

    def photon_numbers(self) -> set[int]:
        return {sum(occ) for occ in self.terms}

    def _with_terms(self, terms: Mapping[Occupation, complex]) -> FockState:
        return FockState(self.registry, terms, self.n_max)


def _check_same(a: FockState, b: FockState) -> None:
    if a.registry != b.registry:
        raise RegistryMismatchError("states are defined over different mode registries")


def vacuum(registry: ModeRegistry, n_max: int = DEFAULT_N_MAX) -> FockState:
    if len(registry) == 0:
        raise ConfigError("empty registry")
    return FockState(registry, {(0,) * len(registry): 1.0 + 0j}, n_max)


def basis_state(registry: ModeRegistry, occupation: Mapping[str, int] | Iterable[int],
                n_max: int = DEFAULT_N_MAX) -> FockState:
    """Normalized Fock basis vector, occupations given positionally or by label."""
    if isinstance(occupation, Mapping):
        occ = [0] * len(registry)
        for label, n in occupation.items():
            occ[registry.index(label)] = n
    else:
        occ = list(occupation)
    return FockState(registry, {tuple(occ): 1.0 + 0j}, n_max)


def apply_creation(state: FockState, mode: ModeLike, power: int = 1) -> FockState:
    """Apply ``(a_mode^dagger)**power``; the result is not renormalized."""
    if int(power) != power or power < 1:
        raise DomainError(f"power must be a positive integer, got {power}")
    j = state.registry.index(mode)
    out = {}
    for occ, amp in state.terms.items():
        if sum(occ) + power > state.n_max:
            raise CapacityError(
                f"creating {power} photon(s) in {state.registry.modes[j].label} on {occ} "
                f"exceeds n_max={state.n_max}"
            )
        n = occ[j]
        factor = math.sqrt(math.prod(range(n + 1, n + power + 1)))
        new = occ[:j] + (n + power,) + occ[j + 1:]
        out[new] = amp * factor
    return state._with_terms(out)


def inner_product(a: FockState, b: FockState) -> complex:
    """<a|b>, antilinear in the first argument."""
    _check_same(a, b)
    small, large = (a, b) if len(a.terms) <= len(b.terms) else (b, a)
    total = 0j
    for occ in small.terms:
        if occ in large.terms:
            total += a.terms[occ].conjugate() * b.terms[occ]
    return total


@dataclass(frozen=True)
class Exactly:
    count: int

    def __call__(self, n: int) -> bool:
        return n == self.count


@dataclass(frozen=True)
class AtLeast:
    count: int

    def __call__(self, n: int) -> bool:
        return n >= self.count


Predicate = Union[Exactly, AtLeast, int]


def detection_probability(
    state: FockState,
    detected: Mapping[ModeLike, Predicate],
    undetected: Iterable[ModeLike] = (),
) -> float:
    """Probability that every detected mode satisfies its count predicate.

    Modes not listed in ``detected`` are summed over freely; listing them in
    ``undetected`` only documents (and checks) that they are traced out.
    Integer predicates mean "exactly k".  The result is the raw weight
    ``sum |amp|^2`` and lies in [0, 1] for normalized input.
    """
    reg = state.registry
    checks = []
    for mode, pred in detected.items():
        if isinstance(pred, int):
            pred = Exactly(pred)
        checks.append((reg.index(mode), pred))
    det_idx = {j for j, _ in checks}
    und_idx = {reg.index(m) for m in undetected}
    if det_idx & und_idx:
        names = sorted(reg.modes[j].label for j in det_idx & und_idx)
        raise DomainError(f"modes {names} are both detected and undetected")
    return float(sum(
        abs(amp) ** 2 for occ, amp in state.terms.items()
        if all(pred(occ[j]) for j, pred in checks)
    ))
