"""Cylindrical and Möbius CSS codes with exact MWPM decoding and performance analysis."""

from __future__ import annotations

from .analysis import ChannelModel, FractionTable, beta, exhaustive_fractions
from .construction import FAMILIES, CssPair, build, css_pair
from .decoder import MwpmDecoder
from .enumerators import WeightEnumerator, stabilizer_we, undetectable_we
from .gf2 import BinaryMatrix
from .stabilizer import CssCode, PauliOperator, syndrome

__version__ = "0.1.0"

__all__ = [
    "FAMILIES",
    "BinaryMatrix",
    "ChannelModel",
    "CssCode",
    "CssPair",
    "FractionTable",
    "MwpmDecoder",
    "PauliOperator",
    "WeightEnumerator",
    "beta",
    "build",
    "css_pair",
    "exhaustive_fractions",
    "stabilizer_we",
    "syndrome",
    "undetectable_we",
]
