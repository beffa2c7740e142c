"""
Author: Louis Goodnews
Date: 2025-09-15
"""

import sys

from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

project = "dilationmra"
author = "Louis Goodnews"
release = "0.1.0"

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
]

napoleon_google_docstring = True
autodoc_member_order = "bysource"

html_theme = "sphinx_rtd_theme"
