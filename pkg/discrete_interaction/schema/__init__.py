# Marker file so setuptools.find_packages() treats this directory as a
# subpackage of discrete_interaction. The package_data declaration
# ``"discrete_interaction.schema": ["*.json"]`` in setup.py only attaches
# data files to directories setuptools knows are packages; without this
# file ``experiment.v1.json`` is missing from the built wheel.
