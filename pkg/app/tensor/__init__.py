"""Dense numerical helpers and the seeded random generator."""
from app.tensor.ops import (
    NORM_FLOOR,
    BATCHNORM_EPS,
    batchnorm_apply,
    conv2d_forward,
    dense_forward,
    flatten,
    global_avg_pool,
    l2_normalize,
    relu,
)
from app.tensor.rng import derive_rng, make_rng

__all__ = [
    "NORM_FLOOR",
    "BATCHNORM_EPS",
    "batchnorm_apply",
    "conv2d_forward",
    "dense_forward",
    "derive_rng",
    "flatten",
    "global_avg_pool",
    "l2_normalize",
    "make_rng",
    "relu",
]
