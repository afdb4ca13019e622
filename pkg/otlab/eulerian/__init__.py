from otlab.eulerian.trajectory import TrajectorySet, EulerianField, unit_value_reduction, box_deposit, \
    rasterize_eulerian, bump_boxes, weak_continuity_residual
from otlab.eulerian.flux import FluxAtoms, FluxSlice, cube_crossings, distance_to_cube, face_id, flux_slice, \
    slice_radii, select_good_slice
from otlab.eulerian.competitor import BoundaryCompetitor, SingularDensity, MainSmoothCompetitor, \
    competitor_boundary, competitor_singular, competitor_main_smooth, time_factor
from otlab.eulerian.orthogonality import OrthogonalityDefect, orthogonality_defect
