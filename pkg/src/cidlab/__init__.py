"""Simulation and exact-verification toolkit for conditionally identically
distributed sequences: path generators, centered statistics, limit-law
samplers, and rational-arithmetic finite-depth checks, plus a CLI harness
(`cidlab`) that packages the whole battery as reproducible experiments."""

from cidlab.errors import (
    CidlabError,
    LawError,
    MatrixError,
    ParameterError,
    PartitionError,
    SizeError,
    UnsupportedCombinationError,
)
from cidlab.kernels import BACKEND
from cidlab.streams import StreamKey, open_stream

__all__ = [
    "BACKEND",
    "CidlabError",
    "LawError",
    "MatrixError",
    "ParameterError",
    "PartitionError",
    "SizeError",
    "StreamKey",
    "UnsupportedCombinationError",
    "open_stream",
]

__version__ = "0.1.0"
