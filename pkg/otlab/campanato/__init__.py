from otlab.campanato.one_step import AffineStep, OneStepResult, ball_averages, build_affine_step, \
    check_preconditions, one_step
from otlab.campanato.ladder import LadderLevel, CampanatoLadder, iterate
from otlab.campanato.holder import holder_quotient, holder_estimate
from otlab.campanato.theorem import RegularityReport, safe_ratio, verify_theorem
from otlab.utils.matrix import sym_expm, sym_sqrtm, plane_rotation, normal_tilt
