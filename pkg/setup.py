"""
Setup script for the Sato-Tate toolkit.
"""

from setuptools import setup, find_packages
from pathlib import Path

# Read README
readme_path = Path(__file__).parent / "README.md"
long_description = readme_path.read_text() if readme_path.exists() else ""

# Read requirements, leaving test tooling to the dev extra
requirements_path = Path(__file__).parent / "requirements.txt"
requirements = []
if requirements_path.exists():
    requirements = requirements_path.read_text().strip().split('\n')
    requirements = [
        req.strip() for req in requirements
        if req.strip() and not req.startswith('#') and not req.startswith('pytest')
    ]

setup(
    name="sato-tate-toolkit",
    version="1.0.0",
    author="Sato-Tate Toolkit Team",
    description="Sato-Tate groups of abelian varieties and Frobenius moment statistics",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["src", "src.*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=requirements,
    extras_require={
        "dev": [
            "pytest>=7.4",
            "pytest-cov>=4.1",
            "black>=23.0",
            "flake8>=6.0",
            "mypy>=1.7",
        ],
        "metrics": [
            "prometheus-client>=0.19",
        ],
    },
    entry_points={
        "console_scripts": [
            "sato-tate=src.sato_tate.cli:main",
        ],
    },
    include_package_data=True,
    zip_safe=False,
)
