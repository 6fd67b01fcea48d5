"""Physical board layout export"""

from bulbpatch.core.board.entities import BoardLayout, BulbPosition
from bulbpatch.core.board.layout import board_to_params, export_board

__all__ = ["BoardLayout", "BulbPosition", "board_to_params", "export_board"]
