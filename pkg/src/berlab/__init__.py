"""Berezin numbers, numerical radii and operator-matrix inequalities on finite RKHS models."""

from __future__ import annotations

from .berezin import (
    BerezinEstimate,
    SearchConfig,
    berezin_number,
    berezin_set_sample,
    berezin_symbol,
    euclid_berezin_number,
    karaev_operator,
)
from .cmatrix import abs_op, apply_fn, gelfand_spectral_radius, herm_eig, jacobi_eigh, operator_norm, power_psd
from .opmatrix import BlockOperator, assemble, compress, embed_corner, hou_chain, off_diag
from .radii import half_norm_check, numerical_radius
from .report import CheckReport
from .rkhs import DirectSumSpace, FiniteSet, TruncatedBergman, TruncatedHardy, parse_space

__version__ = "0.1.0"

__all__ = [
    "BerezinEstimate",
    "BlockOperator",
    "CheckReport",
    "DirectSumSpace",
    "FiniteSet",
    "SearchConfig",
    "TruncatedBergman",
    "TruncatedHardy",
    "abs_op",
    "apply_fn",
    "assemble",
    "berezin_number",
    "berezin_set_sample",
    "berezin_symbol",
    "compress",
    "embed_corner",
    "euclid_berezin_number",
    "gelfand_spectral_radius",
    "half_norm_check",
    "herm_eig",
    "hou_chain",
    "jacobi_eigh",
    "karaev_operator",
    "numerical_radius",
    "off_diag",
    "operator_norm",
    "parse_space",
    "power_psd",
]
