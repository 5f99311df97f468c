"""
``torusflow.spectral`` holds the truncated Fourier representation of fields on the n-torus:

* ``fields.py`` defines ``SpectralField`` and the wavevector grids it lives on.
* ``operators.py`` provides the norms and the diagonal multipliers (derivatives, laplacian and its inverse, semigroups).
* ``convolution.py`` computes exact Galerkin products, directly or through a padded fast transform.
* ``serialization.py`` reads and writes fields as json or binary files.
* ``config.py`` holds ``SolverConfig``.
"""
