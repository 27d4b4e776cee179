import sys
from pathlib import Path

# Allow running the smoke tests from a plain checkout (extension copied into
# python/tmpcl/ by the CMake build) without installing the wheel.
_pkg_root = Path(__file__).resolve().parents[2] / "python"
if (_pkg_root / "tmpcl").is_dir():
    sys.path.insert(0, str(_pkg_root))
