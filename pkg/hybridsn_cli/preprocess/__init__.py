from hybridsn_cli.preprocess.patches import Patch, extract_patch, pad_cube, patch_batch
from hybridsn_cli.preprocess.pca import PcaModel, apply_pca, fit_pca, jacobi_eigh
from hybridsn_cli.preprocess.split import Role, SplitAssignment, stratified_split
from hybridsn_cli.preprocess.standardize import standardize_bands

__all__ = [
    "Patch",
    "PcaModel",
    "Role",
    "SplitAssignment",
    "apply_pca",
    "extract_patch",
    "fit_pca",
    "jacobi_eigh",
    "pad_cube",
    "patch_batch",
    "standardize_bands",
    "stratified_split",
]
