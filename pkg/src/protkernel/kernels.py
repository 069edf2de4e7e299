"""Kernel backend selection: compiled extension when importable, else pure Python."""

import os

if os.environ.get("PROTKERNEL_PURE") == "1":
    from . import _kernels_py as impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as impl
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as impl
        BACKEND = "python"

bfs_all = impl.bfs_all
ds_table = impl.ds_table
independent_profiles = impl.independent_profiles
min_cover = impl.min_cover
max_packing = impl.max_packing
treewidth_dp = impl.treewidth_dp
block_partitions = impl.block_partitions
