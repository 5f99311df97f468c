"""
``torusflow.majorant`` bounds Navier-Stokes solutions coefficient-wise by nonnegative scalar majorants:

* ``sequences.py`` defines majorants and the domination relation ``u << V``.
* ``calculus.py`` checks the rules of the majorant calculus on truncated fields.
* ``equation.py`` solves the majorant integral equation and measures its bilinear estimates.
* ``certification.py`` derives the certified existence time and the small-data global threshold.
"""
