"""Online vector balancing with subgaussian prefix sums, at desk scale."""

__version__ = "0.1.0"

from .core import FiniteScalarDistribution, FiniteVectorDistribution, RandomStream, Transcript  # noqa: E402
from .psi2 import Psi2Bracket, psi2_empirical, psi2_gaussian_analytic, psi2_scalar, psi2_vector_bracket  # noqa: E402
from .nets import CoveringError, Net, SizingError, build_net, conic_decompose  # noqa: E402
from .gauss1d import Interval, gaussian_measure, star_1d  # noqa: E402
from .tree import (  # noqa: E402
    CertifiedDistribution,
    SubgaussianSignSearch,
    TreeBalancer1D,
    TreeSpec,
    balance_tree_1d,
    clone_tree,
    search_subgaussian_distribution,
)
from .signers import (  # noqa: E402
    GreedySigner,
    SelfBalancingWalkSigner,
    TreeCertifiedSigner,
    UniformRandomSigner,
    make_signer,
)
from .adversaries import make_adversary, play  # noqa: E402
from .metrics import DiscrepancyReport, discrepancy, growth_fit  # noqa: E402

__all__ = [
    "CertifiedDistribution", "CoveringError", "DiscrepancyReport", "FiniteScalarDistribution",
    "FiniteVectorDistribution", "GreedySigner", "Interval", "Net", "Psi2Bracket", "RandomStream",
    "SelfBalancingWalkSigner", "SizingError", "SubgaussianSignSearch", "Transcript", "TreeBalancer1D",
    "TreeCertifiedSigner", "TreeSpec", "UniformRandomSigner", "balance_tree_1d", "build_net", "clone_tree",
    "conic_decompose", "discrepancy", "gaussian_measure", "growth_fit", "make_adversary", "make_signer",
    "play", "psi2_empirical", "psi2_gaussian_analytic", "psi2_scalar", "psi2_vector_bracket",
    "search_subgaussian_distribution", "star_1d",
]
