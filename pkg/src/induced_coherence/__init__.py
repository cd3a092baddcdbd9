"""Simulation and analysis of one- and two-pair induced coherence in a
Zou-Wang-Mandel nonlinear interferometer."""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    ConfigError,
    CoverageError,
    DegenerateOutputError,
    DomainError,
    FitError,
    RegistryMismatchError,
    ToolkitError,
)
from .fock import (
    AtLeast,
    Exactly,
    FockState,
    ModeId,
    ModeRegistry,
    apply_creation,
    basis_state,
    detection_probability,
    inner_product,
    vacuum,
)
from .optics import (
    BeamSplitterSpec,
    OverlapSpec,
    apply_beam_splitter,
    apply_overlap,
    apply_phase,
    stimulated_gain_ratio,
)
from .interferometer import (
    ExperimentConfig,
    ScanResult,
    build_pair_state,
    emission_check,
    hom_cross_term_check,
    phase_visibility,
    run_point,
    scan,
)
