"""coview: item co-consumption networks, text-cluster covariates, and ERGMs.

Pipeline in one sentence: user-item interactions project onto an item-item
co-audience network that is binarized by audience Jaccard; item descriptions
build a bigram graph whose communities define word clusters; per-item
cluster word counts become node covariates whose effect on link formation
is quantified with a dyad-independent ERGM.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .graph import Graph

__version__ = "0.1.0"

__all__ = ["Graph", "KERNEL_BACKEND", "__version__"]
