"""Local invariants and local-global embedding questions for etale algebras with
involution over Q, in exact rational arithmetic."""

from .errors import (BoundExceededError, DegenerateFormError, DomainError, InfeasibleError,
                     PreconditionError, UnsupportedExtensionError, VerificationError)
from .places import INF, Place, hilbert_symbol, is_local_square
from .quadform import QuadraticForm, globally_equivalent, invariants, similar
from .etale import EtaleInvolutionAlgebra, trace_form
from .split_embedding import SplitEmbeddingProblem, global_embed
from .kernels import BACKEND

__all__ = [
    "BACKEND", "BoundExceededError", "DegenerateFormError", "DomainError", "EtaleInvolutionAlgebra",
    "INF", "InfeasibleError", "Place", "PreconditionError", "QuadraticForm", "SplitEmbeddingProblem",
    "UnsupportedExtensionError", "VerificationError", "global_embed", "globally_equivalent",
    "hilbert_symbol", "invariants", "is_local_square", "similar", "trace_form",
]

__version__ = "0.1.0"
