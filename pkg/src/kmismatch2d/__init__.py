"""Two-dimensional pattern matching with k mismatches."""
from .gridstring import WILDCARD, Grid2D, OffsetCounts, Sparse2D, oracle_all_offsets, parse_grid, read_grid
from .pipeline import PipelineConfig, kmismatch

__all__ = ["WILDCARD", "Grid2D", "OffsetCounts", "PipelineConfig", "Sparse2D", "kmismatch",
           "oracle_all_offsets", "parse_grid", "read_grid"]
