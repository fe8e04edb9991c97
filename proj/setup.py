"""Builds the native extension ganlab._ganlab from the C++ core sources.

The command-line entry point (src/cli.cpp, src/main.cpp) is deliberately not
part of the extension; everything else in src/ is.
"""

from pathlib import Path

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ROOT = Path(__file__).parent
EXCLUDED = {"cli.cpp", "main.cpp"}
core_sources = sorted(
    str(p.relative_to(ROOT)) for p in (ROOT / "src").glob("*.cpp") if p.name not in EXCLUDED
)

ext = Pybind11Extension(
    "ganlab._ganlab",
    sources=core_sources + ["bindings/ganlab_py.cpp"],
    include_dirs=["include", "vendor"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
