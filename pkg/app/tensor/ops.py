"""Forward-only tensor operations.

Arrays are float32 in storage; every reduction accumulates in float64 through
``np.einsum`` (no BLAS, so the summation order does not depend on thread
count) and is rounded back to the storage dtype of the inputs. A float64
model therefore stays float64 end to end.
"""
from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from app.core.errors import NonFiniteValue, NonIntegralOutputSize, ShapeMismatch, ZeroNorm

NORM_FLOOR = 1e-12
BATCHNORM_EPS = 1e-5


def _storage_dtype(*arrays: np.ndarray) -> np.dtype:
    return np.result_type(*arrays, np.float32)


def _checked(out: np.ndarray, op: str) -> np.ndarray:
    if not np.all(np.isfinite(out)):
        raise NonFiniteValue(f"{op} produced non-finite values")
    return out


def l2_normalize(v: np.ndarray) -> np.ndarray:
    if v.ndim != 1 or v.size == 0:
        raise ShapeMismatch(f"l2_normalize expects a non-empty rank-1 array, got shape {v.shape}")
    wide = v.astype(np.float64)
    norm = np.sqrt(np.einsum("i,i->", wide, wide))
    if not norm > NORM_FLOOR:
        raise ZeroNorm(f"vector norm {norm:.3e} is at or below the floor {NORM_FLOOR:.0e}")
    return _checked((wide / norm).astype(_storage_dtype(v)), "l2_normalize")


def dense_forward(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    if x.ndim != 1 or weight.ndim != 2 or bias.ndim != 1:
        raise ShapeMismatch(f"dense ranks x={x.ndim} W={weight.ndim} b={bias.ndim}, expected 1/2/1")
    n_out, n_in = weight.shape
    if x.shape[0] != n_in or bias.shape[0] != n_out:
        raise ShapeMismatch(f"dense shapes x={x.shape} W={weight.shape} b={bias.shape} do not conform")
    acc = np.einsum("ij,j->i", weight.astype(np.float64), x.astype(np.float64)) + bias.astype(np.float64)
    return _checked(acc.astype(_storage_dtype(x, weight, bias)), "dense_forward")


def conv2d_forward(x: np.ndarray, kernel: np.ndarray, bias: np.ndarray, stride: int = 1, pad: int = 0) -> np.ndarray:
    """Cross-correlation (no kernel flip) with zero padding."""
    if x.ndim != 3 or kernel.ndim != 4 or bias.ndim != 1:
        raise ShapeMismatch(f"conv2d ranks x={x.ndim} kernel={kernel.ndim} b={bias.ndim}, expected 3/4/1")
    if stride < 1 or pad < 0:
        raise ShapeMismatch(f"conv2d stride={stride} pad={pad} invalid")
    c_out, c_in, k_h, k_w = kernel.shape
    if x.shape[0] != c_in or bias.shape[0] != c_out:
        raise ShapeMismatch(f"conv2d shapes x={x.shape} kernel={kernel.shape} b={bias.shape} do not conform")

    height, width = x.shape[1] + 2 * pad, x.shape[2] + 2 * pad
    span_h, span_w = height - k_h, width - k_w
    if span_h < 0 or span_w < 0 or span_h % stride or span_w % stride:
        raise NonIntegralOutputSize(
            f"conv2d output size ({span_h}/{stride}+1, {span_w}/{stride}+1) is not a positive integer"
        )

    wide = np.pad(x.astype(np.float64), ((0, 0), (pad, pad), (pad, pad)))
    windows = sliding_window_view(wide, (k_h, k_w), axis=(1, 2))[:, ::stride, ::stride]
    acc = np.einsum("chwkl,ockl->ohw", windows, kernel.astype(np.float64))
    acc += bias.astype(np.float64)[:, None, None]
    return _checked(acc.astype(_storage_dtype(x, kernel, bias)), "conv2d_forward")


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0).astype(x.dtype)


def batchnorm_apply(
    x: np.ndarray,
    gamma: np.ndarray,
    beta: np.ndarray,
    mean: np.ndarray,
    var: np.ndarray,
    eps: float = BATCHNORM_EPS,
) -> np.ndarray:
    """Inference-mode batch normalization over axis 0 (features or channels)."""
    channels = x.shape[0]
    for name, stat in (("gamma", gamma), ("beta", beta), ("mean", mean), ("var", var)):
        if stat.shape != (channels,):
            raise ShapeMismatch(f"batchnorm {name} shape {stat.shape} does not match {channels} channels")
    spatial = (slice(None),) + (None,) * (x.ndim - 1)
    wide = x.astype(np.float64)
    scale = gamma.astype(np.float64) / np.sqrt(var.astype(np.float64) + eps)
    out = (wide - mean.astype(np.float64)[spatial]) * scale[spatial] + beta.astype(np.float64)[spatial]
    return _checked(out.astype(_storage_dtype(x, gamma, beta, mean, var)), "batchnorm_apply")


def global_avg_pool(x: np.ndarray) -> np.ndarray:
    if x.ndim != 3:
        raise ShapeMismatch(f"global_avg_pool expects C x H x W, got shape {x.shape}")
    spatial = x.shape[1] * x.shape[2]
    acc = np.einsum("chw->c", x.astype(np.float64)) / spatial
    return acc.astype(x.dtype)


def flatten(x: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(x).reshape(-1)
