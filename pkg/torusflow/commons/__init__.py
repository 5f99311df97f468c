"""
``torusflow.commons`` contains all the utilities (helpers, functions, objects, hard-coded variables) which are common to
the task-specific sub-packages. These include notably:

* ``arithmetic.py`` contains helper maths functions: safe divisions, log-linear fits and bisections.
* ``docstrings.py`` centralizes common function and class docstrings in a single place and provides a decorator to retrieve them easily.
* ``exceptions.py`` declares the named failure modes of the solvers and checks.
* ``file_management.py`` provides atomic writers for json, csv and binary outputs, as well as schema validation.
* ``miscellaneous.py`` receives everything which doesn't fit anywhere else, notably the logging configuration.
* ``variables`` contains all the hard-coded variables such as paths, tolerances and file names.
"""
