from otlab.transport.sampling import Lattice, WeightedPoints, cell_fractions, sample_domain, balance_masses
from otlab.transport.plan import TransportPlan, synthetic_plan, monotonicity_defect
from otlab.transport.exact import solve_exact
from otlab.transport.entropic import solve_entropic, annealing_schedule
from otlab.transport.local import solve_local, candidate_pairs
from otlab.transport.mapfield import MapField, extract_map, inverse_map, required_cells
from otlab.transport.affine import AffineChange, apply_affine, apply_affine_samples
