"""Human classification difficulty estimation from embeddings."""

from diffest._core import (  # noqa: F401
    AnnotationRecord,
    AnnotationTable,
    BootstrapReport,
    CaseTruth,
    CentroidSet,
    CertaintyScale,
    ClassWeights,
    DifficultyVector,
    EmbeddingDataset,
    ExtraTreesParams,
    LoaoReport,
    Matrix,
    NeighborRanking,
    ProbabilityMatrix,
    RaterTau,
    SkippedRater,
    SynthConfig,
    SynthData,
    TauResult,
    TreeEnsembleModel,
    TruthOptions,
    aggregate_cases,
    aggregate_truth,
    bootstrap_compare,
    build_features,
    class_weights,
    classification_margin,
    classification_uncertainty,
    compute_centroids,
    cosine_similarity,
    cross_val_predict,
    entropy_score,
    fit_extra_trees,
    inverse_similarity,
    inverse_softmax_similarity,
    kendall_tau,
    leave_one_annotator_out,
    load_annotations,
    load_embeddings,
    load_labels,
    load_probabilities,
    load_scores,
    normalize_per_class,
    predict,
    rank_neighbors,
    sample_classification_power,
    self_taught_score,
    synth_generate,
    tau_to_concordance,
    weighted_roc_auc,
    write_annotations,
    write_embeddings,
    write_scores,
)

__all__ = [name for name in dir() if not name.startswith("_")]
