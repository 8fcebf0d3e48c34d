"""Ray transform of 2D symmetric tensor fields.

Forward line-integral transform of rank-m symmetric tensor fields, Fourier
slice identities in two normalization conventions, weighted Sobolev norms on
fields and sinograms with an isometry check, constructive inversion on
solenoidal fields, and moment-condition range tests — all on desk-scale
grids with pinned tolerances.
"""

from .fields import (
    SolenoidalSpectrum,
    TensorField2D,
    component_spectrum_polar,
    divergence_residual,
    field_l2_norm,
    gaussian_test_field,
    random_solenoidal_field,
    relative_divergence_residual,
    relative_l2_error,
    solenoidal_project,
    symmetrized_gradient,
    synthesize_solenoidal,
    tensor_weights,
)
from .grids import (
    AliasingWarning,
    AngularSeries,
    CartesianGrid,
    PolarFrequencyGrid,
    angular_coefficients,
    evaluate_angular_series,
    fourier_transform_2d,
    inverse_fourier_transform_2d,
    pad_samples,
    padded_spectrum,
    polar_resample,
    polar_sample,
)
from .inversion import (
    MomentOrder,
    MomentReport,
    RangeDataWarning,
    check_moment_conditions,
    invert,
    invert_coefficient_route,
    roundtrip_report,
)
from .io import (
    FileFormatError,
    export_csv,
    read_field,
    read_sinogram,
    write_field,
    write_sinogram,
)
from .norms import (
    SobolevParams,
    TruncationWarning,
    field_norm,
    reshetnyak_check,
    reshetnyak_ratios,
    sinogram_norm,
)
from .ray import Sinogram, forward, parity_residual
from .slices import (
    CONVENTIONS,
    SpectralSinogram,
    fst_coefficient_residual,
    fst_scalar_residual,
    fst_solenoidal_residual,
    measure_slice_constant,
    sup_relative_residual,
    symmetric_q_nodes,
    tilde_coefficients,
    transform_sinogram,
)

__version__ = "0.1.0"

__all__ = [
    "AliasingWarning",
    "AngularSeries",
    "CONVENTIONS",
    "CartesianGrid",
    "FileFormatError",
    "MomentOrder",
    "MomentReport",
    "PolarFrequencyGrid",
    "RangeDataWarning",
    "Sinogram",
    "SobolevParams",
    "SolenoidalSpectrum",
    "SpectralSinogram",
    "TensorField2D",
    "TruncationWarning",
    "angular_coefficients",
    "check_moment_conditions",
    "component_spectrum_polar",
    "divergence_residual",
    "evaluate_angular_series",
    "export_csv",
    "field_l2_norm",
    "field_norm",
    "forward",
    "fourier_transform_2d",
    "fst_coefficient_residual",
    "fst_scalar_residual",
    "fst_solenoidal_residual",
    "gaussian_test_field",
    "inverse_fourier_transform_2d",
    "invert",
    "invert_coefficient_route",
    "measure_slice_constant",
    "pad_samples",
    "padded_spectrum",
    "parity_residual",
    "polar_resample",
    "polar_sample",
    "random_solenoidal_field",
    "read_field",
    "read_sinogram",
    "relative_divergence_residual",
    "relative_l2_error",
    "reshetnyak_check",
    "reshetnyak_ratios",
    "roundtrip_report",
    "sinogram_norm",
    "solenoidal_project",
    "sup_relative_residual",
    "symmetric_q_nodes",
    "symmetrized_gradient",
    "synthesize_solenoidal",
    "tensor_weights",
    "tilde_coefficients",
    "transform_sinogram",
    "write_field",
    "write_sinogram",
]
