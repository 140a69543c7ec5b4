import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from hypothesis import settings

# numba compiles kernels on first call, which would trip per-example deadlines
settings.register_profile("default", deadline=None)
settings.load_profile("default")
