from setuptools import setup, find_packages

setup(
    name="nilsym",
    version="0.1.0",
    packages=find_packages(exclude=["tests"]),
    install_requires=["numpy", "scipy"],
    extras_require={"test": ["hypothesis"]},
    entry_points={"console_scripts": ["nilsym = nilsym.cli:main"]},
    description="Index of symmetry of 2-step nilpotent Lie groups built from orthogonal representations",
)
