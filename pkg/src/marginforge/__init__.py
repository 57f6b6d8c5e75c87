"""marginforge: boosting margin laboratory.

Trains AdaBoost and arc-gv voting classifiers over decision stumps,
computes margin-distribution statistics, evaluates and cross-compares
generalization bounds, and certifies the underlying concentration
inequalities by Monte Carlo.
"""

from .boost import VotingClassifier, alpha_adaboost, alpha_arcgv, run, update_weights
from .bounds import BoundInputs, BoundReport, kl, kl_inverse
from .dataset import BinaryDataset, Dataset, SplitPlan, binarize, cv_splits, load_csv
from .margin import MarginProfile, profile
from .stump import HypothesisSpace, Stump, enumerate_hypotheses, train_stump

__version__ = "0.1.0"

__all__ = [
    "BinaryDataset",
    "BoundInputs",
    "BoundReport",
    "Dataset",
    "HypothesisSpace",
    "MarginProfile",
    "SplitPlan",
    "Stump",
    "VotingClassifier",
    "alpha_adaboost",
    "alpha_arcgv",
    "binarize",
    "cv_splits",
    "enumerate_hypotheses",
    "kl",
    "kl_inverse",
    "load_csv",
    "profile",
    "run",
    "train_stump",
    "update_weights",
]
