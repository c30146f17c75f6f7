"""Module entry point: ``python -m qcx`` behaves like the ``qcx`` script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
