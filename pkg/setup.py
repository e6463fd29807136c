from setuptools import find_packages, setup

setup(
    name="mave-bo",
    version="0.1.0",
    description="Bayesian optimization in an estimated effective dimension reduction space",
    packages=find_packages(include=["src", "src.*"]),
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10.0",
        "pandas>=2.0",
        "pydantic>=2.0.0",
        "python-dotenv>=1.0.0",
        "colorlog>=6.7.0",
        "tqdm>=4.66.1",
    ],
    entry_points={
        "console_scripts": [
            "mavebo-bench=src.bench.cli:main",
        ],
    },
)
