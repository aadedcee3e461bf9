"""
Storage Package
Location: jetnormals/storage/__init__.py

Point, normal, index and shape-list files, checkpoints and CSV reports.
"""

from .checkpoint_format import read_checkpoint_file, write_checkpoint_file
from .point_files import (
    read_indices,
    read_normals,
    read_points,
    read_stem_list,
    write_indices,
    write_normals,
    write_points,
    write_stem_list,
)
from .reports import (
    category_table_path,
    read_csv_table,
    write_category_table,
    write_loss_trace,
    write_report_csv,
)

__all__ = [
    'read_checkpoint_file', 'write_checkpoint_file',
    'read_indices', 'read_normals', 'read_points', 'read_stem_list',
    'write_indices', 'write_normals', 'write_points', 'write_stem_list',
    'category_table_path', 'read_csv_table', 'write_category_table', 'write_loss_trace', 'write_report_csv',
]
