"""Closed-form incoherent-GN nonlinear interference with SRS and frequency-dependent loss.

The closed forms live in :mod:`ign_nli.engine`, the link model in
:mod:`ign_nli.model`, propagation helpers in :mod:`ign_nli.physics` and the
quadrature references in :mod:`ign_nli.oracle`.
"""
from .engine import (Branch, IslandParams, NliError, gsnr, i_cut_asinh, i_cut_li2, i_degenerate,
                     i_xci_asinh, i_xci_li2, island_integral, island_params, link_nli_psd,
                     span_nli_psd)
from .model import (AUTO_GAIN, Channel, FiberParams, FrequencyTable, Link, LinkValidationError,
                    LossModel, NliReport, Span, WdmComb, db_per_km_to_field_alpha, validate_link)
from .physics import (SrsFitConfig, beta2_eff, fit_srs_params, link_transfer,
                      span_power_transfer)
from .specfun import inverse_tangent_integral, li2_imag_diff

__version__ = "0.1.0"

__all__ = [
    "AUTO_GAIN", "Branch", "Channel", "FiberParams", "FrequencyTable", "IslandParams", "Link",
    "LinkValidationError", "LossModel", "NliError", "NliReport", "Span", "SrsFitConfig",
    "WdmComb", "beta2_eff", "db_per_km_to_field_alpha", "fit_srs_params", "gsnr",
    "i_cut_asinh", "i_cut_li2", "i_degenerate", "i_xci_asinh", "i_xci_li2",
    "inverse_tangent_integral", "island_integral", "island_params", "li2_imag_diff",
    "link_nli_psd", "link_transfer", "span_nli_psd", "span_power_transfer", "validate_link",
]
