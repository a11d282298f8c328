"""Global alignment: universal spherical GMM and per-video feature groups."""

from .descriptors import DescriptorSet, pool_features
from .grouping import FeatureGroup, build_feature_groups
from .universal_gmm import SphericalGmm, component_probabilities, fit_spherical_gmm

__all__ = [
    "DescriptorSet",
    "FeatureGroup",
    "SphericalGmm",
    "build_feature_groups",
    "component_probabilities",
    "fit_spherical_gmm",
    "pool_features",
]
