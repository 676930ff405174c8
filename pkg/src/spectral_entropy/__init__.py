"""Semantic spectral entropy: how many meanings does a set of texts hold?

Texts are linked by a pairwise equivalence judge, the resulting graph is
spectrally clustered and the entropy of the cluster proportions is reported,
together with finite-sample error bounds and a simulation harness that checks
them.
"""

from .assignment import ClusterAssignment
from .clustering import (
    KMeansResult,
    SpectralConfig,
    align_labels,
    confusion_matrix,
    kmeans,
    miscluster_error,
    spectral_cluster,
)
from .corpus import ItemList, builtin_lists, generate_collection, load_item_list, true_equivalent
from .entropy import (
    BoundConditionError,
    BoundInputs,
    EntropyReport,
    assignment_entropy,
    chernoff_c2,
    chernoff_shrinkage,
    corollary3_bound,
    entropy,
    h,
    hoeffding_radius,
    lemma1_bound,
    theorem2_bound,
    theorem4_bound,
)
from .graph import SbmParams, SpectralError, laplacian, sample_sbm, spectral_embedding
from .model_selection import CvResult, select_k
from .pipeline import LemmaViolation, PipelineError, run_pipeline
from .simulation import ExperimentConfig, SimulationReport, load_report, persist_report, run_experiment

__version__ = "0.1.0"
