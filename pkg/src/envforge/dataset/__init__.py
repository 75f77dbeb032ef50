from .build import (
    DatasetConfig,
    DatasetManifest,
    DatasetRecord,
    build_dataset,
    build_proportional_dataset,
    load_manifest,
    load_records,
    rebuild_dataset,
    record_id_for,
    sample_env_subset,
    summary_csv,
    uniform_difficulty_split,
)

__all__ = [
    "DatasetConfig",
    "DatasetManifest",
    "DatasetRecord",
    "build_dataset",
    "build_proportional_dataset",
    "load_manifest",
    "load_records",
    "rebuild_dataset",
    "record_id_for",
    "sample_env_subset",
    "summary_csv",
    "uniform_difficulty_split",
]
