from setuptools import find_packages, setup

with open("README.md", 'r', encoding="utf-8") as f:
    long_description = f.read()

with open("requirements/dependents.txt", 'r', encoding="utf-8") as f:
    install_requirements = [line.strip() for line in f.read().splitlines()
                            if line.strip() and not line.startswith("#")
                            and not line.startswith("pytest")]


setup(
    name='network_aggregation',
    version='1.0',
    description='Simulation and verification of sequential logistic '
    'regression over networks of agents that pass logits along a DAG',
    license="MIT",
    long_description=long_description,
    packages=find_packages(include=["network_aggregation",
                                    "network_aggregation.*"]),
    python_requires=">=3.8",
    # external packages as dependencies
    install_requires=install_requirements,
    entry_points={
        "console_scripts": [
            "network-aggregation=network_aggregation.aggregation_main:main",
        ]
    }
)
