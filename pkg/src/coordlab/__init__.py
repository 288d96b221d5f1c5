"""Binary coordination games on regular graphs: potentials, equilibria and log-linear learning."""

__version__ = "0.1.0"
