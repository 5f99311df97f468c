"""This file contains generic docstring chunks to be formatted using ``docstring_formatter``."""


def docstring_formatter(**kwargs):
    """Decorator with arguments filling the ``{placeholders}`` of a docstring through ``str.format``.

    Use it as ``@docstring_formatter(**docstrings)`` to share argument descriptions such as ``{viscosity}`` or
    ``{times}`` across modules. Literal braces in a formatted docstring must be doubled.
    """

    def inner_decorator(func):
        func.__doc__ = func.__doc__.format(**kwargs)
        return func

    return inner_decorator


docstrings = dict()  # Creating docstrings on the fly in order to refer to previously declared elements.

docstrings['field'] = """A ``SpectralField``, i.e. the truncated Fourier coefficients of a (scalar or vector) field on the torus."""

docstrings['velocity'] = """A ``SpectralField`` with as many components as space dimensions, assumed divergence-free."""

docstrings['viscosity'] = """The kinematic viscosity ``nu > 0``."""

docstrings['smoothness'] = """The smoothness index ``s`` of the weighted norm ``sum_k |f_k| w(k)^s``, with ``w(k) = max(|k|_1, 1)``. \
May be negative."""

docstrings['times'] = """The strictly increasing time grid ``0 = t_0 < ... < t_M``, as a 1d numpy array."""

docstrings['rho'] = """The decay parameter of the majorant semigroup, which multiplies mode ``k`` by ``exp(-rho |k|_e^2 lambda)``."""

docstrings['radius'] = """The radius ``r >= 0`` of the analytic norm ``sum_k |f_k| exp(|k|_1 r)``."""

docstrings['constants'] = """The ``CertifiedConstants`` ``(a, rho, lemma1_c)`` of the majorant construction."""

docstrings['threads'] = """The number of worker threads. Results never depend on it."""

docstrings['config'] = """A ``SolverConfig`` holding dimension, truncation, viscosity, horizon, grid size and tolerances."""

docstrings['trajectory'] = """A ``Trajectory``, i.e. a velocity ``SpectralField`` per node of a time grid."""

docstrings['majorant'] = """A nonnegative ``MajorantSequence`` (or the coefficient array of one)."""
