from bmx.commands.block import BlockCommand
from bmx.commands.generate import GenOrthogonalCommand
from bmx.commands.maps import MapCommand
from bmx.commands.orbit import OrbitCommand
from bmx.commands.products import (
    DirsumCommand,
    KronCommand,
    ProductBgCommand,
    ProductCommand,
)
from bmx.commands.svd import SvdCommand
from bmx.commands.transforms import RotateCommand, TransposeCommand
from bmx.commands.verify import VerifyCommand

__all__ = [
    "BlockCommand",
    "DirsumCommand",
    "GenOrthogonalCommand",
    "KronCommand",
    "MapCommand",
    "OrbitCommand",
    "ProductBgCommand",
    "ProductCommand",
    "RotateCommand",
    "SvdCommand",
    "TransposeCommand",
    "VerifyCommand",
]
