"""Barrier constructions: blocks, interfaces, assemblies and their certification."""

from .assembly import BarrierAssembly, BarrierKind, Piece, PiecewiseField, assemble
from .blocks import (
    BLOCK_KINDS,
    BuildingBlock,
    Jet,
    build_block,
    h_star,
    min_length_alpha,
    min_radius_omega,
    plateau_length_alpha,
)
from .certify import (
    PieceMargin,
    ResidualReport,
    certify_residuals,
    interface_rows,
    residuals,
)
from .interfaces import InterfaceCurve, InterfaceId, Junction, find_interface
from .placement import TerracePlacement, place_terrace_pair

__all__ = [
    "BLOCK_KINDS",
    "BarrierAssembly",
    "BarrierKind",
    "BuildingBlock",
    "InterfaceCurve",
    "InterfaceId",
    "Jet",
    "Junction",
    "Piece",
    "PieceMargin",
    "PiecewiseField",
    "ResidualReport",
    "TerracePlacement",
    "assemble",
    "build_block",
    "certify_residuals",
    "find_interface",
    "h_star",
    "interface_rows",
    "min_length_alpha",
    "min_radius_omega",
    "place_terrace_pair",
    "plateau_length_alpha",
    "residuals",
]
