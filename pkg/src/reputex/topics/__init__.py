"""Topic modeling: collapsed Gibbs LDA with a compiled hot kernel.

The sweep kernel has two interchangeable backends (Cython extension and pure
Python) selected at import in .kernels; everything else lives in .model.
"""

from .kernels import BACKEND_NAME, available_backends, get_backend
from .model import (
    EmptyCorpus,
    IndexOutOfRange,
    LdaHyperparams,
    TopicModelState,
    TopicReport,
    TopicTerm,
    full_conditional,
    gibbs_sweep,
    init_model,
    log_joint,
    phi,
    report_from_phi,
    theta,
    top_terms,
    train,
)

__all__ = [
    "BACKEND_NAME",
    "EmptyCorpus",
    "IndexOutOfRange",
    "LdaHyperparams",
    "TopicModelState",
    "TopicReport",
    "TopicTerm",
    "available_backends",
    "full_conditional",
    "get_backend",
    "gibbs_sweep",
    "init_model",
    "log_joint",
    "phi",
    "report_from_phi",
    "theta",
    "top_terms",
    "train",
]
