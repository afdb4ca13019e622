from otlab.quick_start.quick_start import run_lab, accept, list_families, fit_slopes
from otlab.quick_start.plot import plot_csv, plot_ladder, plot_profile, plot_ratio
