from otlab.quantities.energy import EnergyReport, ball_cell_weights, energy_E, energy_two_resolutions, \
    sup_displacement, energy_report, control_lambda
from otlab.quantities.linf import LinfStatistics, linf_ratio, linf_statistics
from otlab.quantities.checks import TopologicalCheck, check_topological, check_global_halfspace
