"""
``torusflow.analyticity`` measures the smoothing of computed solutions: coefficient decay rates, decay towards the mean,
values in complex strips and analytic-norm gaps between solutions.
"""
