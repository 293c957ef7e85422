import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

CORE_SOURCES = [
    "src/scores.cpp",
    "src/distributions.cpp",
    "src/functionals.cpp",
    "src/identification.cpp",
    "src/network.cpp",
    "src/data_io.cpp",
    "src/train.cpp",
    "src/phi_select.cpp",
    "src/model.cpp",
    "src/commands.cpp",
]

eigen_include = os.environ.get("EIGEN3_INCLUDE_DIR", "/usr/include/eigen3")

ext = Pybind11Extension(
    "dqr._dqr",
    sources=["python/bindings.cpp"] + CORE_SOURCES,
    include_dirs=["include", "vendor", eigen_include],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
