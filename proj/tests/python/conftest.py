import glob
import os
import sys

# Make the extension importable from the plain-CMake build tree when the
# package is not pip-installed.
_here = os.path.dirname(os.path.abspath(__file__))
_root = os.path.dirname(os.path.dirname(_here))
for cand in (os.environ.get("AFC_BUILD_DIR"), os.path.join(_root, "build")):
    if cand and glob.glob(os.path.join(cand, "afcnode_core*.so")):
        sys.path.insert(0, cand)
        break
