"""Plan-completion toolkit: action embeddings plus EM-based recognition."""

from .baseline import MatchConfig, match_recognize
from .corpus import (
    HOLE_TOKEN,
    MaskSpec,
    Observation,
    PlanLibrary,
    Vocabulary,
    generate_blocks_corpus,
    generate_route_corpus,
    load_corpus,
    mask_plan,
    observation_from_tokens,
    observation_to_tokens,
    parse_corpus,
    parse_observation_tokens,
    save_corpus,
    serialize_corpus,
    split_folds,
)
from .embedding import (
    EmbeddingModel,
    HuffmanTree,
    TrainConfig,
    build_huffman,
    corpus_log_likelihood,
    load_model,
    log_prob,
    predict_distribution,
    save_model,
    train_skipgram,
)
from .errors import (
    CorpusFormatError,
    DegenerateVocabularyError,
    EmptyCorpusError,
    EmptyLibraryError,
    InvalidConfigError,
    NumericError,
    PlanRecError,
    TooLargeError,
    UnknownActionError,
)
from .evaluate import (
    ExperimentResult,
    ExperimentSpec,
    accuracy,
    corpus_features,
    result_csv,
    result_summary,
    run_experiment,
    save_results,
)
from .recognizer import (
    EmConfig,
    PositionWeights,
    RecognitionResult,
    em_recognize,
    exhaustive_recognize,
    initial_weights,
    objective,
    objective_gradient,
    project_weights,
    sample_holes,
    sampling_view,
    score_plan,
    weighted_pair_log_prob,
)
from .service import create_app, model_digest, resolve_bind

__version__ = "0.1.0"

__all__ = [
    "CorpusFormatError",
    "DegenerateVocabularyError",
    "EmbeddingModel",
    "EmConfig",
    "EmptyCorpusError",
    "EmptyLibraryError",
    "ExperimentResult",
    "ExperimentSpec",
    "HOLE_TOKEN",
    "HuffmanTree",
    "InvalidConfigError",
    "MaskSpec",
    "MatchConfig",
    "NumericError",
    "Observation",
    "PlanLibrary",
    "PlanRecError",
    "PositionWeights",
    "RecognitionResult",
    "TooLargeError",
    "TrainConfig",
    "UnknownActionError",
    "Vocabulary",
    "accuracy",
    "build_huffman",
    "corpus_features",
    "corpus_log_likelihood",
    "create_app",
    "em_recognize",
    "exhaustive_recognize",
    "generate_blocks_corpus",
    "generate_route_corpus",
    "initial_weights",
    "load_corpus",
    "load_model",
    "log_prob",
    "mask_plan",
    "match_recognize",
    "model_digest",
    "objective",
    "objective_gradient",
    "observation_from_tokens",
    "observation_to_tokens",
    "parse_corpus",
    "parse_observation_tokens",
    "predict_distribution",
    "project_weights",
    "resolve_bind",
    "result_csv",
    "result_summary",
    "run_experiment",
    "sample_holes",
    "sampling_view",
    "save_corpus",
    "save_model",
    "save_results",
    "score_plan",
    "serialize_corpus",
    "split_folds",
    "train_skipgram",
    "weighted_pair_log_prob",
]
