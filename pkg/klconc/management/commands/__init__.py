"""Subcommands of the klconc command line, one module per subcommand."""
