"""Zeros of Cauchy-wavelet scalograms of white noise and masks built from them."""
from .errors import CalibrationError, DataError, DomainError, EmptyDiskError, QuadratureError, ROIViolation
from .estimators import (
    ChebyshevResult, PCFEstimate, ZeroIndex, chebyshev_deviation_test, estimate_local_intensity, estimate_pcf,
)
from .filtering import (
    CalibrationProfile, Mask, MaskConfig, apply_mask, build_mask, build_masks, calibrate, intensity_statistic,
    pcf_statistic,
)
from .hyperbolic import (
    PHDisk, RegionOfInterest, UHPPoint, Window, boundary_distance, hyperbolic_area, observation_window,
    ph_ball_contains, ph_distance, roi_filter,
)
from .pipeline import analyze, white_noise_zeros
from .stats import (
    ReferenceStats, corrected_pcf, count_variance, expected_count, first_intensity, pair_correlation,
    ring_count_expectation,
)
from .wavelet import (
    GridSpec, Scalogram, SignalBuffer, TimeScaleGrid, WaveletParams, forward_cwt, generate_white_noise,
    inverse_cwt, refine_noise, wavelet_freq, wavelet_time,
)
from .zeros import ZeroSet, extract_zeros, zero_density_map

__version__ = "0.1.0"
