from __future__ import annotations

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__

from pydantic import BaseModel, ConfigDict, Field

from app.core.errors import ShapeMismatch


class LayerKind(StrEnum):
    DENSE = "dense"
    CONV2D = "conv2d"
    RELU = "relu"
    BATCHNORM = "batchnorm"
    GLOBAL_AVG_POOL = "global_avg_pool"
    FLATTEN = "flatten"
    L2_NORMALIZE = "l2_normalize"


PRUNABLE_KINDS = frozenset({LayerKind.DENSE, LayerKind.CONV2D})


class LayerSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: LayerKind
    in_features: int | None = Field(default=None, ge=1)
    out_features: int | None = Field(default=None, ge=1)
    in_channels: int | None = Field(default=None, ge=1)
    out_channels: int | None = Field(default=None, ge=1)
    kernel_size: int | None = Field(default=None, ge=1)
    stride: int | None = Field(default=None, ge=1)
    pad: int | None = Field(default=None, ge=0)
    num_features: int | None = Field(default=None, ge=1)
    eps: float | None = Field(default=None, gt=0)
    embedding_head: bool = False

    @property
    def prunable(self) -> bool:
        return self.kind in PRUNABLE_KINDS

    @property
    def out_units(self) -> int | None:
        """Output channels (conv) or features (dense) of a prunable layer."""
        if self.kind == LayerKind.DENSE:
            return self.out_features
        if self.kind == LayerKind.CONV2D:
            return self.out_channels
        return None

    def param_shapes(self) -> list[tuple[int, ...]]:
        if self.kind == LayerKind.DENSE:
            return [(self.out_features, self.in_features), (self.out_features,)]
        if self.kind == LayerKind.CONV2D:
            k = self.kernel_size
            return [(self.out_channels, self.in_channels, k, k), (self.out_channels,)]
        if self.kind == LayerKind.BATCHNORM:
            return [(self.num_features,)] * 4
        return []

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        """Shape produced from ``input_shape``; raises ShapeMismatch when they do not conform."""
        kind = self.kind
        if kind == LayerKind.DENSE:
            if input_shape != (self.in_features,):
                raise ShapeMismatch(f"dense expects ({self.in_features},), got {input_shape}")
            return (self.out_features,)
        if kind == LayerKind.CONV2D:
            if len(input_shape) != 3 or input_shape[0] != self.in_channels:
                raise ShapeMismatch(f"conv2d expects ({self.in_channels}, H, W), got {input_shape}")
            sizes = []
            for extent in input_shape[1:]:
                span = extent + 2 * self.pad - self.kernel_size
                if span < 0 or span % self.stride:
                    raise ShapeMismatch(f"conv2d output size is not integral for input {input_shape}")
                sizes.append(span // self.stride + 1)
            return (self.out_channels, *sizes)
        if kind == LayerKind.RELU:
            return input_shape
        if kind == LayerKind.BATCHNORM:
            if not input_shape or input_shape[0] != self.num_features:
                raise ShapeMismatch(f"batchnorm expects {self.num_features} channels, got {input_shape}")
            return input_shape
        if kind == LayerKind.GLOBAL_AVG_POOL:
            if len(input_shape) != 3:
                raise ShapeMismatch(f"global_avg_pool expects (C, H, W), got {input_shape}")
            return (input_shape[0],)
        if kind == LayerKind.FLATTEN:
            size = 1
            for extent in input_shape:
                size *= extent
            return (size,)
        if len(input_shape) != 1:
            raise ShapeMismatch(f"l2_normalize expects a rank-1 input, got {input_shape}")
        return input_shape


def dense(in_features: int, out_features: int, embedding_head: bool = False) -> LayerSpec:
    return LayerSpec(
        kind=LayerKind.DENSE,
        in_features=in_features,
        out_features=out_features,
        embedding_head=embedding_head,
    )


def conv2d(in_channels: int, out_channels: int, kernel_size: int, stride: int = 1, pad: int = 0) -> LayerSpec:
    return LayerSpec(
        kind=LayerKind.CONV2D,
        in_channels=in_channels,
        out_channels=out_channels,
        kernel_size=kernel_size,
        stride=stride,
        pad=pad,
    )


def batchnorm(num_features: int, eps: float = 1e-5) -> LayerSpec:
    return LayerSpec(kind=LayerKind.BATCHNORM, num_features=num_features, eps=eps)


def relu() -> LayerSpec:
    return LayerSpec(kind=LayerKind.RELU)


def global_avg_pool() -> LayerSpec:
    return LayerSpec(kind=LayerKind.GLOBAL_AVG_POOL)


def flatten() -> LayerSpec:
    return LayerSpec(kind=LayerKind.FLATTEN)


def l2_normalize() -> LayerSpec:
    return LayerSpec(kind=LayerKind.L2_NORMALIZE)
