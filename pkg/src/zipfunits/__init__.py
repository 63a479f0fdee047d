"""Turn discrete unit sequences into rank-frequency statistics.

The pipeline: quantize continuous feature frames into unit sequences with a
k-means codebook, count n-grams, build rank-frequency distributions, fit
f_r = a * r**-eta by least squares in log space, and quantify how speaker
groups deviate from a reference. Every step is deterministic given a seed.
"""

from .deviation import (
    DEFAULT_TOP_K,
    DeviationReport,
    GroupStats,
    compare_groups,
    partition_by_group,
    report_to_dict,
    subsample_groups,
    top_mass,
    write_report_json,
)
from .errors import (
    BadBand,
    BadMagic,
    BadVersion,
    DegeneratePoints,
    DimensionMismatch,
    EmptyTable,
    IncompatibleTables,
    InsufficientData,
    InsufficientPoints,
    IoFailure,
    MalformedRecord,
    MissingReference,
    NonFiniteValue,
    TooFewPoints,
    TruncatedPayload,
    ZeroLength,
    ZipfUnitsError,
)
from .ngrams import (
    NgramTable,
    char_sequence,
    choose_n,
    count_char_ngrams,
    count_unit_ngrams,
    count_words,
    merge,
    read_table_csv,
    write_table_csv,
)
from .powerlaw import (
    DEFAULT_PLOT_POINTS,
    DEFAULT_TRIM_HI,
    DEFAULT_TRIM_LO,
    PowerLawFit,
    PowerLawRegressor,
    RankEntry,
    RankFrequency,
    fit_powerlaw,
    fit_report,
    rank_frequency,
    sample_zipf,
    sample_zipf_sequence,
    thin,
    trim,
    trim_bounds,
    write_plot_csv,
)
from .quantize import (
    DEFAULT_K,
    Codebook,
    KMeansQuantizer,
    assign,
    dedupe,
    inertia,
    kmeans_train,
    read_codebook,
    write_codebook,
)
from .records import (
    FeatureMatrix,
    ManifestEntry,
    TokenRecord,
    UtteranceRecord,
    load_feature_matrices,
    read_feature_matrix,
    read_manifest,
    read_token_records,
    read_unit_records,
    write_feature_matrix,
    write_manifest,
    write_token_records,
    write_unit_records,
)

__version__ = "0.1.0"

__all__ = [
    "BadBand",
    "BadMagic",
    "BadVersion",
    "Codebook",
    "DEFAULT_K",
    "DEFAULT_PLOT_POINTS",
    "DEFAULT_TOP_K",
    "DEFAULT_TRIM_HI",
    "DEFAULT_TRIM_LO",
    "DegeneratePoints",
    "DeviationReport",
    "DimensionMismatch",
    "EmptyTable",
    "FeatureMatrix",
    "GroupStats",
    "IncompatibleTables",
    "InsufficientData",
    "InsufficientPoints",
    "IoFailure",
    "KMeansQuantizer",
    "MalformedRecord",
    "ManifestEntry",
    "MissingReference",
    "NgramTable",
    "NonFiniteValue",
    "PowerLawFit",
    "PowerLawRegressor",
    "RankEntry",
    "RankFrequency",
    "TokenRecord",
    "TooFewPoints",
    "TruncatedPayload",
    "UtteranceRecord",
    "ZeroLength",
    "ZipfUnitsError",
    "assign",
    "char_sequence",
    "choose_n",
    "compare_groups",
    "count_char_ngrams",
    "count_unit_ngrams",
    "count_words",
    "dedupe",
    "fit_powerlaw",
    "fit_report",
    "inertia",
    "kmeans_train",
    "load_feature_matrices",
    "merge",
    "partition_by_group",
    "rank_frequency",
    "read_codebook",
    "read_feature_matrix",
    "read_manifest",
    "read_table_csv",
    "read_token_records",
    "read_unit_records",
    "report_to_dict",
    "sample_zipf",
    "sample_zipf_sequence",
    "subsample_groups",
    "thin",
    "top_mass",
    "trim",
    "trim_bounds",
    "write_codebook",
    "write_feature_matrix",
    "write_manifest",
    "write_plot_csv",
    "write_report_json",
    "write_table_csv",
    "write_token_records",
    "write_unit_records",
]
