"""Entry point for ``python -m freeotoc``.

Delegates to the Click-based CLI in ``freeotoc.cli.app``.
"""
from freeotoc.cli.app import main


if __name__ == "__main__":
    main()
