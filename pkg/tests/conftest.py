from __future__ import annotations

import os
import sys

from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

# reproducible property tests; fuzz suites pick their own seeds
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")
