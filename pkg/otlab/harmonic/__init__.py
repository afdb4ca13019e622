from otlab.harmonic.neumann import NeumannRecord, PotentialField, half_cube_axes, solve_neumann, flux_neumann_data, \
    tilde_neumann_data
from otlab.harmonic.approximation import HarmonicSolution, harmonic_potential, harmonic_approximation, main_competitor
