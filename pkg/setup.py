from setuptools import setup, find_packages
import re

# read the contents of your README file
from pathlib import Path

this_directory = Path(__file__).parent
long_description = (this_directory / "Readme.md").read_text()


def _read_version():
    """Single-source the version from discrete_interaction/__init__.py.

    Parsed as text (not imported) so building the sdist never has to import
    the package or its dependencies.
    """
    init_py = (this_directory / "discrete_interaction" / "__init__.py").read_text()
    match = re.search(r'^__version__\s*=\s*["\']([^"\']+)["\']', init_py, re.M)
    if match is None:
        raise RuntimeError(
            "Unable to find __version__ in discrete_interaction/__init__.py"
        )
    return match.group(1)


with open("requirements.txt", "r") as f:
    requirements = [
        line.strip() for line in f.read().splitlines()
        if line.strip() and not line.startswith("#")
    ]

setup(
    name="discrete_interaction",
    version=_read_version(),
    description="Numerical experiments for the discrete-interaction picture of quantum mechanics",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=("tests", "tests.*", "examples", "examples.*")),
    package_data={
        "": ["Readme.md"],
        "discrete_interaction.schema": ["*.json"],
    },
    include_package_data=True,
    entry_points={
        # Validates a config against schema/experiment.v1.json and runs the
        # experiment it names.
        "console_scripts": [
            "di-lab = discrete_interaction.cli.run:main",
        ],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.11",
    install_requires=requirements,
)
