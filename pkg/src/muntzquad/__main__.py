"""Allow ``python -m muntzquad``."""

import sys

from .cli import main

sys.exit(main())
