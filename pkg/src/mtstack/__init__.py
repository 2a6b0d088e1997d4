"""mtstack: machine-translation engineering stack.

Corpus loading and cleaning, smoothed n-gram language models,
cross-entropy-difference data selection, byte-pair-encoding subword
segmentation, BLEU/chrF evaluation with bootstrap significance testing, a
reversible pre/post-processing text pipeline, and a distributed
translation gateway with pluggable backends.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND

__all__ = ["KERNEL_BACKEND", "__version__"]
