import os
import setuptools

here = os.path.abspath(os.path.dirname(__file__))

meta_data: dict[str, str] = {}

with open("README.md", "r", encoding="utf-8") as f:
    long_description = f.read()

with open("requirements.txt", "r", encoding="utf-8") as f:
    requires = [line for line in f.read().split("\n") if line]

with open(os.path.join(here, "eigmax", "__version__.py"),
          "r",
          encoding="utf-8") as f:
    exec(f.read(), meta_data)

setuptools.setup(
    name=meta_data["__title__"],
    version=meta_data["__version__"],
    author=meta_data["__author__"],
    author_email=meta_data["__author_email__"],
    description=meta_data["__description__"],
    long_description=long_description,
    long_description_content_type="text/markdown",
    url=meta_data["__url__"],
    packages=setuptools.find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Intended Audience :: Education",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.9",
    install_requires=requires,
    extras_require={"tests": ["pytest", "hypothesis"]},
    entry_points={"console_scripts": ["eigmax=eigmax.cli.app:main"]},
)
