from setuptools import find_packages, setup

setup(
    name="submodmm",
    version="0.1.0",
    packages=find_packages(include=["submodmm", "submodmm.*"]),
    install_requires=[
        "numpy>=1.20.0",
        "argcomplete>=3.1.0",
        "networkx>=2.6",
        "scipy>=1.7.0",
    ],
    entry_points={
        "console_scripts": [
            "submodmm=submodmm.cli:main",
        ],
    },
    include_package_data=True,
    python_requires=">=3.8",
    author="submodmm Team",
    description="Majorize-minimize and minorize-maximize for submodular set functions",
    long_description="""A Python library and CLI tool for submodular minimization and maximization via semigradients""",
    long_description_content_type="text/markdown",
)
