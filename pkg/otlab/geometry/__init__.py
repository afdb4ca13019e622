from otlab.geometry.graph import BoundaryGraph, outward_normal, holder_seminorm_normals, deviation_D, width_delta
from otlab.geometry.region import AbstractRegion, SlabRegion, BoxRegion, UnionRegion, AffineImageRegion
from otlab.geometry.domain import Domain, TangencyFrame, graph_domain, transformed_chart, normalize_tangency
