"""Elastic inner product vector spaces for time series and symbol sequences."""
from .product import ElasticParams, eip, eip_distance, eip_matrix, eip_norm, elastic_product
from .series import LabeledDataset, TimeSeries, embed_on_grid, oplus, scale, validate

__version__ = "0.1.0"

__all__ = [
    "ElasticParams",
    "LabeledDataset",
    "TimeSeries",
    "eip",
    "eip_distance",
    "eip_matrix",
    "eip_norm",
    "elastic_product",
    "embed_on_grid",
    "oplus",
    "scale",
    "validate",
]
