"""Weighted configurations on the boundary of nonpositively curved spaces.

Decide whether a configuration is stable, and when it is, build a closed
polygon whose edges point at the configuration's ideal points with the
prescribed lengths.
"""

from .core import (
    GaussMapError, IdealPoint, Point, Polygon, WeightedConfiguration, comparison_angle,
    configuration, distance, geodesic_point,
)
from .projection import (
    Bounded, ConvergesTo, FactorSlice, GeodesicLine, GeodesicSegment, Subtree,
    analyze_ray_projection, project_point,
)
from .solver import (
    FixedPointReport, Status, apply_phi, build_polygon, commutativity_gap, delta_side_lengths,
    find_fixed_point, gauss_map, gauss_map_is_unique, is_gauss_map,
)
from .spaces import (
    Euclidean, Hyperbolic2, MetricTree, Product, busemann, ideal_point_of_segment, ray_point,
    segment_extensions, tits_angle,
)
from .stability import StabilityReport, Verdict, classify, slope, weighted_busemann

__version__ = "0.1.0"
