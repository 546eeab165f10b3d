"""Fairgroup construction: post-process any binary classifier so that its
positive class holds protected and unprotected points at a fixed ratio."""

from .classifiers import LinearModel, TrainConfig, load_model, predict, save_model, score, train
from .clustering import Clustering, kmedians, l1_distance
from .config import ExperimentConfig, load_config, parse_config_text
from .dataset import (
    ACS_SCHEMA,
    Dataset,
    FeatureSpec,
    SynthConfig,
    binarize_protected,
    load_csv,
    save_csv,
    set_protected,
    synth_acs,
)
from .fairgroups import BalanceRatio, Fairgroup, FairgroupPlan, build_fairgroups, plan_balance, reduce_ratio
from .importance import ImportanceMatrix, build_importance, pearson, rank_column, weights_from_correlations
from .metrics import FairnessReport, balance, evaluate
from .pipeline import (
    ExperimentResult,
    FairPrediction,
    PropagationMode,
    fair_classify,
    load_dataset,
    run_experiment,
)

__version__ = "0.1.0"
