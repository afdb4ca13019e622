# -*- coding: utf-8 -*-

"""
otlab.evaluator.register
########################
"""
import inspect
import sys


def cluster_info(module_name):
    """Collect the acceptance criteria defined in ``module_name``.

    Every class defined there must carry a ``criterion_id`` and a ``title``.

    Args:
        module_name (str): the name of module ``otlab.evaluator.criteria``.

    Returns:
        dict: criterion ids mapped to criterion classes, ordered by id.
    """
    c_dict = {}
    criterion_class = inspect.getmembers(
        sys.modules[module_name], lambda x: inspect.isclass(x) and x.__module__ == module_name
    )
    for name, criterion_cls in criterion_class:
        for attribute in ('criterion_id', 'title'):
            if getattr(criterion_cls, attribute, None) is None:
                raise AttributeError(f"Criterion '{name}' has no attribute [{attribute}].")
        if criterion_cls.criterion_id in c_dict:
            raise AttributeError(f"Criterion id [{criterion_cls.criterion_id}] is registered twice.")
        c_dict[criterion_cls.criterion_id] = criterion_cls
    return dict(sorted(c_dict.items(), key=lambda item: int(item[0])))


criterion_module_name = 'otlab.evaluator.criteria'
criteria_dict = cluster_info(criterion_module_name)
