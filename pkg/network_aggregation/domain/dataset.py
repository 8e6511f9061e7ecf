"""
The shared dataset every agent sees a vertical slice of

Feature indices are 1-based in every public function of this module, so
feature x_1 is `dataset.column(1)`.
"""
from typing import Iterable, NamedTuple, Optional

import numpy as np

from network_aggregation.errors import (
    IndexOutOfRange, InvalidLabels, LengthMismatch, NonFinite)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=np.float64)
    array.setflags(write=False)
    return array


class Dataset(NamedTuple):
    """
    Feature matrix, binary labels and the optional generator side channels
        (latent columns and known optimal logits)
    """
    n: int
    d: int
    features: np.ndarray
    labels: np.ndarray
    latents: Optional[np.ndarray] = None
    optimal_logits: Optional[np.ndarray] = None

    def column(self, feature_index: int) -> np.ndarray:
        """
        Get feature x_l as a column

        Args:
            feature_index (int): 1-based feature index l

        Raises:
            IndexOutOfRange: l is outside 1..d

        Returns:
            np.ndarray: length n view of the feature column
        """
        if not 1 <= feature_index <= self.d:
            raise IndexOutOfRange(
                f"Feature index {feature_index} outside 1..{self.d}")
        return self.features[:, feature_index - 1]

    def columns(self, feature_indices: Iterable[int]) -> np.ndarray:
        """
        Get several features, in the order given, as an n x |indices| matrix
        """
        indices = list(feature_indices)
        for feature_index in indices:
            if not 1 <= feature_index <= self.d:
                raise IndexOutOfRange(
                    f"Feature index {feature_index} outside 1..{self.d}")
        return self.features[:, [index - 1 for index in indices]]

    @property
    def has_latents(self) -> bool:
        return self.latents is not None

    def __repr__(self) -> str:
        return (f"Dataset<n={self.n}, d={self.d}, "
                f"latents={self.has_latents}, "
                f"optimal_logits={self.optimal_logits is not None}>")


def make_dataset(features: np.ndarray, labels: np.ndarray,
                 latents: Optional[np.ndarray] = None,
                 optimal_logits: Optional[np.ndarray] = None) -> Dataset:
    """
    Validate raw arrays and wrap them into a read-only Dataset

    Args:
        features (np.ndarray): n x d real matrix
        labels (np.ndarray): length n vector with values in {0, 1}
        latents (np.ndarray, optional): n x k latent columns. Defaults to None.
        optimal_logits (np.ndarray, optional): length n optimal logits.
            Defaults to None.

    Raises:
        NonFinite: any feature, latent or optimal logit is nan/inf
        InvalidLabels: a label is neither 0 nor 1
        LengthMismatch: row counts disagree

    Returns:
        Dataset: validated dataset
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features.reshape(-1, 1)
    if features.ndim != 2:
        raise LengthMismatch(
            f"features must be a 2-D matrix, got shape {features.shape}")
    if not np.all(np.isfinite(features)):
        raise NonFinite("features contain non-finite values")
    sample_count, feature_count = features.shape

    raw_labels = np.asarray(labels)
    if raw_labels.ndim != 1 or raw_labels.shape[0] != sample_count:
        raise LengthMismatch(
            f"labels have shape {raw_labels.shape}, expected ({sample_count},)")
    if not np.all((raw_labels == 0) | (raw_labels == 1)):
        raise InvalidLabels("labels must only contain 0 and 1")
    label_array = raw_labels.astype(np.float64)

    if latents is not None:
        latents = np.asarray(latents, dtype=np.float64)
        if latents.ndim == 1:
            latents = latents.reshape(-1, 1)
        if latents.shape[0] != sample_count:
            raise LengthMismatch(
                f"latents have {latents.shape[0]} rows, expected "
                f"{sample_count}")
        if not np.all(np.isfinite(latents)):
            raise NonFinite("latents contain non-finite values")
        latents = _frozen(latents)

    if optimal_logits is not None:
        optimal_logits = np.asarray(optimal_logits, dtype=np.float64)
        if optimal_logits.shape != (sample_count,):
            raise LengthMismatch(
                f"optimal_logits have shape {optimal_logits.shape}, expected "
                f"({sample_count},)")
        if not np.all(np.isfinite(optimal_logits)):
            raise NonFinite("optimal_logits contain non-finite values")
        optimal_logits = _frozen(optimal_logits)

    return Dataset(sample_count, feature_count, _frozen(features),
                   _frozen(label_array), latents, optimal_logits)


def prefix_sum_residual(dataset: Dataset) -> float:
    """
    Largest relative deviation between the row-wise prefix sums of the
        features and the latent columns (sum_{j<=i} x_j = Z_i)

    Args:
        dataset (Dataset): dataset with latents and as many latent columns as
            features

    Raises:
        LengthMismatch: the dataset has no latents or a different number of
            latent columns than features

    Returns:
        float: max |prefix - Z| / max(1, |Z|) over all rows and columns
    """
    if dataset.latents is None or dataset.latents.shape[1] != dataset.d:
        raise LengthMismatch(
            "prefix sums need one latent column per feature")
    prefix_sums = np.cumsum(dataset.features, axis=1)
    scale = np.maximum(1.0, np.abs(dataset.latents))
    return float(np.max(np.abs(prefix_sums - dataset.latents) / scale))
