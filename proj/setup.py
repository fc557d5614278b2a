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
        out_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)
        source_dir = Path(__file__).parent.resolve()
        subprocess.run(
            [
                "cmake",
                str(source_dir),
                "-DDRIFTZERO_PYTHON=ON",
                "-DCMAKE_BUILD_TYPE=Release",
                f"-DPYTHON_EXECUTABLE={sys.executable}",
                f"-DDRIFTZERO_MODULE_OUTPUT_DIR={out_dir}",
            ],
            cwd=build_dir,
            check=True,
        )
        subprocess.run(["cmake", "--build", str(build_dir), "--target", "_core"],
                       cwd=build_dir, check=True)


setup(ext_modules=[CMakeExtension("driftzero._core")], cmdclass={"build_ext": CMakeBuild})
