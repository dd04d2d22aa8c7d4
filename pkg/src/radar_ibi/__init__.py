"""Noncontact heartbeat inter-beat-interval estimation from radar slow-time data.

Pipeline: beamformed range-angle imaging, static-clutter removal, phase-based
displacement sensing, PSD-guided high-pass cutoff selection, and
waveform-topology interval estimation with similarity gating. A physics-based
scene simulator and an evaluation harness make every stage verifiable without
recorded data.
"""

from .config import PipelineConfig, chimp_config, human_config
from .displacement import (
    DetrendConfig,
    DisplacementTrace,
    extract_phase_displacement,
    gaussian_detrend,
)
from .errors import (
    DataIntegrityError,
    DegenerateInputError,
    EmptyComparisonError,
    FeatureWindowError,
    NoTroughError,
)
from .evaluation import (
    EvalReport,
    ReferenceIbi,
    SweepPoint,
    best_sweep_point,
    cutoff_sweep,
    load_reference_beats,
    rms_error,
)
from .imaging import (
    BeamformerWeights,
    RadarCube,
    RadarImage,
    TargetLocation,
    beamform,
    locate_target,
    make_beamformer_weights,
    remove_static_clutter,
    taylor_weights,
)
from .pipeline import ProcessResult, process_cube
from .scene_sim import (
    ArrayGeometry,
    GroundTruthTrace,
    PhysioModel,
    SceneSpec,
    chimp_default_scene,
    default_geometry,
    human_default_scene,
    ibi_ramp,
    synth_displacement,
    synth_radar_cube,
)
from .spectral_cutoff import (
    CHIMP_BAND,
    HUMAN_BAND,
    CutoffSelection,
    FilterSpec,
    Psd,
    SpeciesBand,
    apply_filter,
    baseline_bandpass_specs,
    estimate_psd,
    find_cutoff,
    identify_second_harmonic,
    select_cutoff,
)
from .topology_ibi import (
    FeatureKind,
    FeaturePoint,
    FeatureSequence,
    GateThresholds,
    IbiEntry,
    IbiSeries,
    PairScore,
    estimate_ibi,
    extract_features,
    ibi_bounds_for_band,
    local_corr,
    topo_similarity,
)

__version__ = "0.1.0"
