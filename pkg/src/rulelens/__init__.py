"""rulelens: explain labeled tabular data as sparse, statistically tested
fuzzy if-then rules, trace suspicious rules to records, and flag
logically inconsistent rule pairs."""

from .dataset import ColumnKind, Dataset, DatasetError, infer_kinds, load_csv, split_target
from .fitting import FitReport, LassoConfig, PipelineConfig, fit_pipeline
from .linguistics import Vocabulary, build_vocabulary, discretize, membership, mom_peak
from .rulegen import Rule, format_rule, generate_rules, parse_rule

__version__ = "0.1.0"

__all__ = [
    "ColumnKind", "Dataset", "DatasetError", "infer_kinds", "load_csv", "split_target",
    "FitReport", "LassoConfig", "PipelineConfig", "fit_pipeline",
    "Vocabulary", "build_vocabulary", "discretize", "membership", "mom_peak",
    "Rule", "format_rule", "generate_rules", "parse_rule",
    "__version__",
]
