from setuptools import Extension, setup

# The compiled grid-scan kernel is optional: when Cython or a C compiler is
# unavailable the package falls back to the vectorized numpy kernel.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "imexkg._hstab_cy",
                ["src/imexkg/_hstab_cy.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
