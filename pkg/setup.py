from setuptools import setup, find_packages

setup(
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    py_modules=["cli", "exceptions", "main", "server"],
)
