"""
Features Module
- Welch PSD 대역 전력 (PSD-SVM용)
- one-vs-rest CSP 로그 분산 (CSP-LDA용)
"""

from .csp import CspModel, CspTransformer, csp_fit, csp_transform, fit_csp_arrays, mean_covariance
from .spectral import DEFAULT_BANDS, BandDefinition, BandPowerExtractor, band_powers, welch_psd

__all__ = [
    "BandDefinition",
    "DEFAULT_BANDS",
    "welch_psd",
    "band_powers",
    "BandPowerExtractor",
    "CspModel",
    "csp_fit",
    "csp_transform",
    "fit_csp_arrays",
    "mean_covariance",
    "CspTransformer",
]
