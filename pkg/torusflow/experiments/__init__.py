"""
``torusflow.experiments`` turns run manifests into artifacts:

* ``config.py`` holds ``RunManifest``, validated against ``manifest.schema.json``.
* ``generators.py`` builds the initial velocities (``taylor-green``, ``single-mode``, ``random-hs`` or a field file).
* ``experiments.py`` runs the six named experiments and writes their csv and json outputs.
* ``pipeline.py`` is the command line.
"""
