"""Command-line entry point for config-driven batch experiments.

``di-lab`` (``discrete_interaction.cli.run:main``) has three subcommands:

    list       Print every experiment name with a one-line description.
    validate   Parse a config and check it against ``schema/experiment.v1.json``;
               report violations with line and column, never run numerics.
    run        Validate, resolve defaults (see ``conventions``), run the
               experiment, write its metric tables and a report, and exit 0
               only when every built-in check passed.
"""
