"""Sector-structured semidefinite solver for the state-comparison benchmark."""

from .ipm import SdpSolution, certified_upper_bound, solution_to_json, solve
from .projection import ProjectionSolution, solve_projection
from .structure import (
    BlockSdp,
    SectorLayout,
    assemble_problem,
    blocks_to_dense,
    build_layout,
    dense_partial_trace,
    dense_partial_transpose,
    from_objective_blocks,
    hvec,
    sector_dims,
    unhvec,
)

__all__ = [
    "BlockSdp",
    "ProjectionSolution",
    "SdpSolution",
    "SectorLayout",
    "assemble_problem",
    "blocks_to_dense",
    "build_layout",
    "certified_upper_bound",
    "dense_partial_trace",
    "dense_partial_transpose",
    "from_objective_blocks",
    "hvec",
    "sector_dims",
    "solution_to_json",
    "solve",
    "solve_projection",
    "unhvec",
]
