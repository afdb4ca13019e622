from otlab.evaluator.base_criterion import *
from otlab.evaluator.criteria import *
from otlab.evaluator.evaluator import *
from otlab.evaluator.register import *
