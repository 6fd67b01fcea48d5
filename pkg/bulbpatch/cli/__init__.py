"""Command-line surface: python -m bulbpatch <subcommand>."""
