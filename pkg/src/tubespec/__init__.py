"""Spectral lower bounds for hyperbolic 3-manifolds, desk scale.

One-dimensional reductions of Hodge-Laplacian eigenproblems on Margulis
tubes, exact integer algebra for Mayer-Vietoris section matrices, a
covering lower-bound evaluator, and the pipelines that assemble them into
diameter-based eigenvalue bounds.
"""

from .assembly import (
    BoundReport,
    FillingReport,
    ModelManifold,
    ThickPartSpec,
    assemble_cover,
    diameter_proxy,
    scaling_fit,
    theorem1_bounds,
    theorem2_sequence,
)
from .covering import CoverSpec, OpenPiece, Overlap, evaluate
from .intmat import IntMatrix, SectionData, adjugate, assemble_section, det, op_norm
from .spectra import TubeSpectrum, scaling_constants, tube_mu1
from .sturm import MeshSpec, SLProblem, SpectrumResult, lowest_eigenvalues
from .tube import FillingSlope, Tube

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Tube",
    "FillingSlope",
    "MeshSpec",
    "SLProblem",
    "SpectrumResult",
    "lowest_eigenvalues",
    "TubeSpectrum",
    "tube_mu1",
    "scaling_constants",
    "IntMatrix",
    "SectionData",
    "det",
    "adjugate",
    "op_norm",
    "assemble_section",
    "CoverSpec",
    "OpenPiece",
    "Overlap",
    "evaluate",
    "ThickPartSpec",
    "ModelManifold",
    "BoundReport",
    "FillingReport",
    "assemble_cover",
    "diameter_proxy",
    "theorem1_bounds",
    "theorem2_sequence",
    "scaling_fit",
]
