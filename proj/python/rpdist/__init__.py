"""Relative pairwise inner product distance between embedding spaces."""

from ._core import (
    AlignedPair,
    EmbeddingMatrix,
    NullDistribution,
    PerWordEntry,
    RpdError,
    RpdIoError,
    RpdReport,
    TruncatedSvd,
    align_vocabularies,
    analytic_null_mean,
    cross_gram_inner,
    entry_scale,
    evaluate,
    gram_frobenius_norm,
    layout_from_distances,
    load_embeddings,
    monte_carlo_null,
    pairwise_matrix,
    random_gaussian_embedding,
    rpd,
    rpd_embeddings,
    save_embeddings,
    spearman,
    standardize,
    train_svd,
    z_test,
)

__all__ = [name for name in dir() if not name.startswith("_")]
