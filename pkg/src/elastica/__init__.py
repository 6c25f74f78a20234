"""Algorithmic-complexity experiments on a randomly forced vibrating beam."""

from .beam import (
    REFERENCE_CONFIG, BeamConfig, ConfigError, DisplacementField, ForceField,
    cfl_number, dump_field, simulate,
)
from .campaign import (
    AnalysisReport, CampaignConfig, TrialRecord, analyze, run_campaign, run_trial,
)
from .complexity import (
    ComplexityReport, SystemDescription, bits_per_character, compress_len,
    deficiency_estimate, output_complexity, serialize_system, system_complexity, x_prime,
)
from .forcing import (
    BinaryForceSpec, TernaryForceSpec, assemble_force_field, draw_binary, draw_ternary, entropy,
)
from .stats import (
    RegressionReport, Sample, confidence_band, durbin_watson, f_survival, linfit,
    nn_spread_w, nn_spread_z, sqrt_model_fit, t_quantile,
)
from .symbolize import (
    SymbolSeq, frequency_ones, nonzero_subsequence, output_sequence, ternarize,
)

__version__ = "0.1.0"
