"""Entry point for ``python -m mergeruns``."""

from .cli import main

main()
