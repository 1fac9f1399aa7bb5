"""Python bindings for the fuelgeo C++ library."""

from ._fuelgeo import (
    FuelgeoError,
    gwr_fit,
    haversine_km,
    moran_index,
    optimize_bandwidth,
    parse_price_records,
    pca_variance_explained,
    run_cli,
    spearman_rank,
    variance_decomposition,
)

__all__ = [
    "FuelgeoError",
    "gwr_fit",
    "haversine_km",
    "moran_index",
    "optimize_bandwidth",
    "parse_price_records",
    "pca_variance_explained",
    "run_cli",
    "spearman_rank",
    "variance_decomposition",
]
__version__ = "0.1.0"
