# yapf: disable

general_arguments = [
    'schema_version',
    'family',
    'seed', 'reproducibility',
    'state',
    'out_dir',
    'show_progress', 'plots',
    'threads',
]

geometry_arguments = [
    'dimension', 'allow_3d',
    'alpha',
    'extent', 'height',
    'chart_nodes',
    'lam0',
    'tangency_threshold',
]

solver_arguments = [
    'n',
    'backend', 'assignment_backend', 'plan_mode',
    'max_pairs',
    'balance_tol',
    'reg', 'reg_start', 'reg_decay', 'sinkhorn_max_iter', 'sinkhorn_tol',
    'local_cutoff', 'local_rounds',
    'coverage_limit',
]

eulerian_arguments = [
    'tau',
    'raster_cells', 'time_slices',
    'n_radii',
]

harmonic_arguments = [
    'neumann_n',
    'harmonic_radius',
]

campanato_arguments = [
    'radius',
    'theta',
    'depth', 'ladder_min_cells',
    'smallness',
    'holder_resolution',
    'ladder_constant_cap', 'lambda_constant_cap', 'step_constant_cap', 'holder_constant_cap',
]

experiment_arguments = [
    'eps', 'amplitude', 'amplitudes', 'lam', 'shift', 'angle', 'offset', 'saddle',
    'criteria', 'acceptance_n',
]
