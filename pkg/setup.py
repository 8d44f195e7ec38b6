import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("planesing._kernel._fastrref",
                   ["src/planesing/_kernel/_fastrref.pyx"])],
        language_level=3,
    )
except Exception as exc:  # noqa: BLE001 - fall back to the pure-Python kernel
    sys.stderr.write("planesing: building without compiled kernel (%s)\n" % exc)

setup(ext_modules=ext_modules)
