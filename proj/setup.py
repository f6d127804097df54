"""Builds the pybind11 extension through the project's CMake configuration.

The canonical build system is CMake (option ADVSAMP_BUILD_PYTHON); this shim
lets pip drive it so `pip install -e . --no-build-isolation` works without a
separate CMake-aware backend.
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        out_dir.mkdir(parents=True, exist_ok=True)

        configure = [
            "cmake",
            "-S", str(source_dir),
            "-B", str(build_dir),
            "-DCMAKE_BUILD_TYPE=Release",
            "-DADVSAMP_BUILD_PYTHON=ON",
            "-DADVSAMP_BUILD_TESTS=OFF",
            f"-DPython_EXECUTABLE={sys.executable}",
        ]
        try:
            import pybind11

            configure.append(f"-Dpybind11_DIR={pybind11.get_cmake_dir()}")
        except ImportError:
            pass
        if shutil.which("ninja"):
            configure += ["-G", "Ninja"]
        subprocess.run(configure, check=True)
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_advsamp"],
            check=True,
        )

        built = sorted(build_dir.glob("_advsamp*.so"))
        if not built:
            raise RuntimeError("CMake build produced no _advsamp extension")
        shutil.copy2(built[-1], self.get_ext_fullpath(ext.name))


setup(
    ext_modules=[CMakeExtension("advsamp._advsamp")],
    cmdclass={"build_ext": CMakeBuild},
)
