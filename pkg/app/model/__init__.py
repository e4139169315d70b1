"""Sequential embedding networks, the flat parameter view and the PFQM format."""
from app.model.layers import LayerKind, LayerSpec
from app.model.network import Model, forward
from app.model.params import ParamView, apply_mask, param_vector_view, scatter
from app.model.serialization import load_model, save_model

__all__ = [
    "LayerKind",
    "LayerSpec",
    "Model",
    "ParamView",
    "apply_mask",
    "forward",
    "load_model",
    "param_vector_view",
    "save_model",
    "scatter",
]
