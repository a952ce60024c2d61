"""Allow ``python -m linkcast``."""

import sys

from .cli import main

sys.exit(main())
