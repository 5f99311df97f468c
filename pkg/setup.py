import pathlib

from setuptools import setup, find_packages

here = pathlib.Path(__file__).parent.resolve()

# Get the long description from the README file
long_description = (here / "README.md").read_text(encoding="utf-8")

setup(
    name="torusflow",  # Required
    # Versions should comply with PEP 440:
    # https://www.python.org/dev/peps/pep-0440/
    version="0.1.0",  # Required
    description="Spectral Navier-Stokes solver and majorant certificates on the n-torus",  # Optional
    long_description=long_description,  # Optional
    long_description_content_type="text/markdown",  # Optional
    classifiers=[  # Optional
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
        "Programming Language :: Python :: 3.10",
    ],
    license="GPL v3",
    keywords="navier-stokes, spectral-methods, fourier-series, majorants, analyticity",  # Optional
    packages=find_packages(exclude=["tests", "tests.*"]),  # Required
    # 'pip install' checks this and refuses to install the project if the version does not match.
    python_requires=">=3.10, <4",
    install_requires=[
        'jsonschema',
        'lazy_objects @ git+https://github.com/sven-nm/lazy_objects.git',
        'numpy',
        'pandas',
        'tqdm',
    ],  # Optional
    # Users will be able to install these using the "extras" syntax, e.g. ``pip install torusflow[dev]``
    extras_require={  # Optional
        'dev': [
            'pytest',
        ],
    },

    # ========= DATA===============
    include_package_data=True,
    package_data={  # Optional
        "torusflow": ["data/templates/*"],
    },

    # Provides the ``torusflow`` command, see ``torusflow/experiments/pipeline.py``
    entry_points={  # Optional
        "console_scripts": [
            "torusflow=torusflow.experiments.pipeline:main",
        ],
    },
)
