"""Phishing URL feature forensics.

Extract lexical and HTML-content features, rank them by information gain
and chi-squared, combine the top-n lists, and compare classifiers on the
selected feature sets.
"""

from .content import (
    ContentFeatureSet,
    HtmlDocument,
    HyperlinkClass,
    RtConfig,
    TagInventory,
    classify_hyperlink,
    extract_content_features,
    scan_document,
)
from .dataset import (
    REFERENCE_SCHEMA,
    BadLabel,
    BadValue,
    Dataset,
    DiscreteDataset,
    EmptyDataset,
    Example,
    FeatureSchema,
    SchemaMismatch,
    UnknownFeature,
    discretize,
    load_csv,
    project,
    split_dataset,
    standardize,
    write_csv,
)
from .models import (
    DimensionMismatch,
    EvaluationReport,
    GaussianNBModel,
    KnnModel,
    LinearHyper,
    LinearModel,
    NonFiniteLoss,
    SingleClassTraining,
    evaluate,
    knn_classify,
    predict_linear,
    predict_naive_bayes,
    run_experiment_grid,
    train_knn,
    train_linear_svc,
    train_naive_bayes,
)
from .selection import (
    ContingencyTable,
    CorrelationMatrix,
    FeatureScore,
    LabelCounts,
    Ranking,
    chi_squared,
    correlation_matrix,
    entropy,
    information_gain,
    rank_features,
    select_top_n_combined,
)
from .urls import (
    InvalidThresholds,
    LexicalFeatureSet,
    MalformedUrl,
    UrlParts,
    apply_rt_thresholds,
    count_sensitive_words,
    extract_lexical_features,
    load_brand_list,
    parse_url,
)

__version__ = "0.1.0"
