from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="veronese-limits",
    version="0.1.0",
    description="Limit sets of Veronese groups: images of Kleinian groups under the irreducible representation of PSL(2,C)",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["sources", "sources.*"]),
    py_modules=["cli"],
    include_package_data=True,
    install_requires=[
        "numpy>=1.24.4",
        "scipy>=1.9.3",
        "sympy>=1.12",
        "pydantic>=2.10.6",
        "pydantic_core>=2.27.2",
        "python-dotenv>=1.0.0",
        "termcolor>=2.4.0",
        "tqdm>4"
    ],
    entry_points={
        "console_scripts": [
            "veronese=cli:main",
        ],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.10",
)
