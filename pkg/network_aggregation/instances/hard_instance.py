"""
The hard instance for cyclic paths

Latents Z_1..Z_k are independent standard normals, the features are their
differences x_1 = Z_1, x_i = Z_i - Z_{i-1}, and the label is
Bernoulli(sigma(Z_k)). The optimal logit Z_k = x_1 + ... + x_k is a prefix
sum that a cyclic path can only assemble one feature per agent.

Sampling is bit-reproducible from (seed, k, n): a Philox counter-based
generator keyed by the seed produces raw 64-bit words, their top 53 bits
become uniforms (j + 0.5) / 2^53 in the open interval (0, 1), and normals
are drawn by inverse CDF (scipy.special.ndtri). Latents and labels use two
independent Philox streams.
"""
import logging
from typing import NamedTuple, Tuple

import numpy as np
from scipy.special import ndtri

from network_aggregation.domain.dataset import Dataset, make_dataset
from network_aggregation.errors import InvalidDimension
from network_aggregation.solver.logistic_utils import sigmoid

logger = logging.getLogger(__name__)

LATENT_STREAM = 0
LABEL_STREAM = 1

_UNIFORM_SCALE = 2.0 ** -53
_MAX_SEED = 2 ** 64


class HardInstanceSpec(NamedTuple):
    """
    Size and seed of a hard instance
    """
    k: int
    n: int
    seed: int = 0

    def validate(self) -> "HardInstanceSpec":
        """
        Raises:
            InvalidDimension: k < 2, n < 1 or a seed outside the u64 range
        """
        if self.k < 2:
            raise InvalidDimension(f"Hard instance needs k >= 2, got {self.k}")
        if self.n < 1:
            raise InvalidDimension(f"Hard instance needs n >= 1, got {self.n}")
        if not 0 <= self.seed < _MAX_SEED:
            raise InvalidDimension(
                f"Seed must be an unsigned 64-bit integer, got {self.seed}")
        return self

    def to_dict(self) -> dict:
        return dict(self._asdict())


def philox_stream(seed: int, stream: int) -> np.random.Philox:
    """
    Independent Philox stream `stream` for `seed`, streams are 2^128 draws
        apart
    """
    return np.random.Philox(key=seed).jumped(stream)


def uniform_53(bit_generator: np.random.Philox, size: int) -> np.ndarray:
    """
    Uniforms (j + 0.5) / 2^53 from the top 53 bits of raw 64-bit words,
        never exactly 0 or 1
    """
    raw_words = bit_generator.random_raw(size)
    return ((raw_words >> np.uint64(11)).astype(np.float64) + 0.5) * \
        _UNIFORM_SCALE


def standard_normal(bit_generator: np.random.Philox,
                    size: int) -> np.ndarray:
    """
    Standard normal draws by inverse CDF of 53-bit uniforms

    Args:
        bit_generator (np.random.Philox): stream to consume
        size (int): number of draws

    Returns:
        np.ndarray: `size` normal draws
    """
    return ndtri(uniform_53(bit_generator, size))


def latents_to_features(latents: np.ndarray) -> np.ndarray:
    """
    Differencing map x_1 = Z_1, x_i = Z_i - Z_{i-1}, applied row-wise
    """
    latent_matrix = np.asarray(latents, dtype=np.float64)
    return np.diff(latent_matrix, axis=1, prepend=0.0)


def draw_latents(spec: HardInstanceSpec) -> np.ndarray:
    """
    n x k latent matrix, filled row-major from the latent stream
    """
    spec.validate()
    stream = philox_stream(spec.seed, LATENT_STREAM)
    return standard_normal(stream, spec.n * spec.k).reshape(spec.n, spec.k)


def draw_labels(optimal_logits: np.ndarray, seed: int) -> np.ndarray:
    """
    Bernoulli(sigma(z)) labels, y = 1 iff u < sigma(z) for a uniform u of
        the label stream
    """
    stream = philox_stream(seed, LABEL_STREAM)
    uniforms = uniform_53(stream, len(optimal_logits))
    return (uniforms < sigmoid(optimal_logits)).astype(np.float64)


def generate_hard_instance(spec: HardInstanceSpec) -> Dataset:
    """
    Sample a hard instance dataset

    Args:
        spec (HardInstanceSpec): k, n and seed

    Raises:
        InvalidDimension: invalid spec

    Returns:
        Dataset: d = k features, labels, latents Z_1..Z_k and the optimal
            logits Z_k
    """
    spec.validate()
    latents = draw_latents(spec)
    optimal_logits = latents[:, -1].copy()
    labels = draw_labels(optimal_logits, spec.seed)
    logger.debug("Generated hard instance k=%d n=%d seed=%d, mean label %.4f",
                 spec.k, spec.n, spec.seed, float(np.mean(labels)))
    return make_dataset(latents_to_features(latents), labels, latents,
                        optimal_logits)


def relevance_set(k: int, p: int) -> Tuple[int, ...]:
    """
    Features I_p = {x_{k-p+1}, ..., x_k} that the best predictor at the end
        of pass p can depend on

    Args:
        k (int): dimension
        p (int): pass index, 1 <= p <= k

    Raises:
        InvalidDimension: p outside 1..k

    Returns:
        Tuple[int, ...]: ascending 1-based feature indices
    """
    if not 1 <= p <= k:
        raise InvalidDimension(f"Pass index p={p} must lie in 1..{k}")
    return tuple(range(k - p + 1, k + 1))
