"""Cross-modal hybrid transfer network."""

from ._chtn import (
    DegenerateInput,
    DivergenceError,
    InvalidArgument,
    InvalidState,
    IoError,
    Model,
    ParseError,
    UndefinedQuery,
    average_precision,
    default_kernel_multipliers,
    evaluate_retrieval,
    gradcheck,
    make_synthetic,
    median_heuristic,
    mmd2,
    softmax_loss,
    train,
)

__version__ = "0.1.0"
