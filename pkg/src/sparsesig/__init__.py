"""Sparse-signal reconstruction from reduced measurements, missing-sample
noise statistics, Hermite-transform tooling, and concentration-driven
decomposition of multivariate time-frequency signals."""

from .blocks import BlockFrame, frame_blocks, merge_blocks
from .errors import InvalidArgument, NumericFailure, ParseError
from .experiments import (ExperimentResult, ExperimentSpec,
                          detection_experiment, nonsparse2d_experiment,
                          nonsparse_experiment, run_experiment,
                          snr_experiment, variance_experiment)
from .generators import add_awgn, generate
from .hermite_opt import (CompressResult, ScaleOptConfig, ScaleOptResult,
                          ShiftOptResult, compress_keep_largest,
                          denoise_hard_threshold, optimize_scale,
                          optimize_shift, scale_pipeline)
from .measurement import (MeasurementSet, PartialMatrix, build_partial_matrix,
                          coherence_index, initial_estimate, sample_support,
                          verify_recovery_condition)
from .recon import (GradientResult, ReconConfig, ReconResult, cosamp,
                    gradient_recon, ls_on_support, omp, threshold_iterative,
                    threshold_single)
from .tfa import (DecompositionResult, DecomposeConfig, IFEstimate,
                  MultivariateSignal, TFRMatrix, concentration_measure,
                  count_components, decompose, estimate_if,
                  mv_autocorrelation, mv_autocorrelation_sm, smethod,
                  spectrogram, stft, wigner)
from .theory import (AwgnHermiteVariance, MCResult, ProbabilityReport,
                     SparseModel, SparsityBound, VarianceReport,
                     awgn_dht1_variance, detection_error_probability,
                     detection_threshold, mc_experiment,
                     missing_sample_variance, nonsparse_error_energy,
                     snr_after_reconstruction, sparsity_bound)
from .transforms import (HermiteBasis, HermiteGrid, IndexGrid, Signal,
                         TransformOperator, UniformGrid, build_hermite_basis,
                         build_transform, hermite_functions, hermite_nodes,
                         sinc_resample, transform)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
