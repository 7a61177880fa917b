"""Dataset loaders, splits, metrics, embedding interchange, diagnostics."""

from .datasets import (
    DataError,
    EmptyDatasetError,
    MoleculeSample,
    PairSample,
    RowError,
    SchemaError,
    TaskDataset,
    load_pairs,
    load_tasks,
    split,
)
from .embstore import (
    DimMismatchError,
    EmbeddingRecord,
    EmbeddingStore,
    EmbeddingStoreError,
    FormatError,
    read_embedding_store,
    write_embedding_store,
)
from .metrics import (
    ConstantTargetsError,
    LengthMismatchError,
    MetricsError,
    MetricsReport,
    SingleClassError,
    classification_report,
    metrics_auc,
    metrics_regression,
    regression_report,
)
from .stats import dataset_stats, stats_table

__all__ = [
    "ConstantTargetsError",
    "DataError",
    "DimMismatchError",
    "EmbeddingRecord",
    "EmbeddingStore",
    "EmbeddingStoreError",
    "EmptyDatasetError",
    "FormatError",
    "LengthMismatchError",
    "MetricsError",
    "MetricsReport",
    "MoleculeSample",
    "PairSample",
    "RowError",
    "SchemaError",
    "SingleClassError",
    "TaskDataset",
    "classification_report",
    "dataset_stats",
    "load_pairs",
    "load_tasks",
    "metrics_auc",
    "metrics_regression",
    "read_embedding_store",
    "regression_report",
    "split",
    "stats_table",
    "write_embedding_store",
]
