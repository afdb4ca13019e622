from otlab.data.instance import LabInstance
from otlab.data.utils import *

__all__ = ['LabInstance', 'create_instance', 'solve_plan']
