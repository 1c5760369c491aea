from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "chcpair._boxkernel",
                ["src/chcpair/_boxkernel.pyx"],
                extra_compile_args=["-O2"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython at build time: the pure-Python kernel is used instead.
    ext_modules = []

setup(ext_modules=ext_modules)
