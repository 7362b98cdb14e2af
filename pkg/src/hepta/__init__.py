"""Structured eigenvalues, eigenvectors, determinants and inverses of
heptadiagonal symmetric matrices with perturbed corners."""

from .algebra import DetResult, StructuredInverse, apply_inverse, determinant, inverse
from .core import (CornerGap, HeptaSpec, build_H, build_H_hat, omega_basis, omega_coefficients,
                   omega_matrix, omega_reconstruct)
from .errors import (ConvergenceError, FormulaInapplicableError, HeptaError, InvalidSpecError,
                     SingularLambdaError, SingularMatrixError, SingularStructureError)
from .spectral import (EigenSolution, Enclosure, SecularFunction, build_secular, eigenvalues,
                       eigenvector, eigenvector_or_fallback, enclosures, rank2_spectrum,
                       solve_secular)
from .transform import (BlockPair, ParityPermutation, SineTransform, apply_S,
                        assemble_from_blocks, block_diagonalize, lambda_spectrum, sine_samples)

__version__ = "0.1.0"

__all__ = [
    "BlockPair", "ConvergenceError", "CornerGap", "DetResult", "EigenSolution", "Enclosure",
    "FormulaInapplicableError", "HeptaError", "HeptaSpec", "InvalidSpecError",
    "ParityPermutation", "SecularFunction", "SineTransform", "SingularLambdaError",
    "SingularMatrixError", "SingularStructureError", "StructuredInverse", "apply_S",
    "apply_inverse", "assemble_from_blocks", "block_diagonalize", "build_H", "build_H_hat",
    "build_secular", "determinant", "eigenvalues", "eigenvector", "eigenvector_or_fallback",
    "enclosures", "inverse", "lambda_spectrum", "omega_basis", "omega_coefficients",
    "omega_matrix", "omega_reconstruct", "rank2_spectrum", "sine_samples", "solve_secular",
]
