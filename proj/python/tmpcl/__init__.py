"""Positive-aware contrastive learning with pseudo-label clustering.

Thin re-export of the compiled extension; everything lives in C++.
"""

from ._tmpcl import (  # noqa: F401
    ClusterConfig,
    Dataset,
    EncoderParams,
    EpochRecord,
    EvalReport,
    EvalSplit,
    LabelGenerator,
    LossConfig,
    LossMode,
    LossOutput,
    OptimConfig,
    ProtocolError,
    PseudoLabeling,
    PulConfig,
    SampleRecord,
    SamplerConfig,
    SynthConfig,
    TrainConfig,
    TrainLog,
    TrainResult,
    ViewBatch,
    ViewConfig,
    Views,
    assign_pseudo_labels,
    average_precision,
    contrastive_loss,
    cosine_lr,
    cosine_sim,
    dbscan,
    embed_dataset,
    evaluate,
    generate_labels,
    generate_synthetic,
    jaccard_distance,
    load_checkpoint,
    load_dataset,
    make_identity_split,
    make_views,
    pairwise_euclidean_normed,
    pk_sample_epoch,
    pul_labels,
    random_sample_epoch,
    run_training,
    save_checkpoint,
    save_dataset,
    write_report_csv,
    write_train_log_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
