"""Joint tuning of cloud cluster layout and data-platform parameters.

The library trains a surrogate execution-time model on benchmark runs and
searches the joint (cloud configuration, platform parameters) space with a
recursive random search, reporting the tuned configuration with its
predicted time and dollar cost. See the README for the module map and the
``demos/`` scripts for narrative walkthroughs.
"""

__version__ = "0.1.0"

from .configspace import (
    Catalog,
    CatalogError,
    CloudConfig,
    JointConfig,
    JointSpace,
    NodeFlavor,
    ParameterSpec,
    PlatformSpec,
    UnitPoint,
    decode,
    default_catalog,
    encode,
    load_catalog,
    space_size,
    validate_cloud,
)
from .cost import cost_of, load_prices, vcpu_proportional_prices
from .dataset import WORKLOADS, Dataset, TrainingSample, load_csv, r2_score, save_csv, split
from .oracle import OracleSpec, SyntheticOracle, gen_dataset, true_time
from .pipeline import (
    EvaluationReport,
    Recommendation,
    TrainingReport,
    evaluate,
    exact_optimum,
    recommend,
    recommend_all,
    train_offline,
)
from .rrs import RRSParams, SearchTrace, brute_force_min, rrs_minimize
from .surrogate import (
    ForestHyper,
    ForestModel,
    LinearModel,
    featurize,
    fit_forest,
    fit_linear,
    load_forest,
    predict,
    save_forest,
)

__all__ = [
    "Catalog",
    "CatalogError",
    "CloudConfig",
    "Dataset",
    "EvaluationReport",
    "ForestHyper",
    "ForestModel",
    "JointConfig",
    "JointSpace",
    "LinearModel",
    "NodeFlavor",
    "OracleSpec",
    "ParameterSpec",
    "PlatformSpec",
    "RRSParams",
    "Recommendation",
    "SearchTrace",
    "SyntheticOracle",
    "TrainingReport",
    "TrainingSample",
    "UnitPoint",
    "WORKLOADS",
    "brute_force_min",
    "cost_of",
    "decode",
    "default_catalog",
    "encode",
    "evaluate",
    "exact_optimum",
    "featurize",
    "fit_forest",
    "fit_linear",
    "gen_dataset",
    "load_catalog",
    "load_csv",
    "load_forest",
    "load_prices",
    "predict",
    "r2_score",
    "recommend",
    "recommend_all",
    "rrs_minimize",
    "save_csv",
    "save_forest",
    "space_size",
    "split",
    "train_offline",
    "true_time",
    "validate_cloud",
    "vcpu_proportional_prices",
]
