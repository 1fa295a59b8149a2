#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# screenbem documentation build configuration file.
#
# Only the values that differ from Sphinx defaults are set here.

import os
import sys

# The project root holds the package; autodoc imports it from there.
cwd = os.getcwd()
project_root = os.path.dirname(cwd)
sys.path.insert(0, project_root)

import screenbem  # noqa: E402

extensions = ["sphinx.ext.autodoc", "sphinx.ext.viewcode", "sphinx.ext.napoleon"]
templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = u"screenbem"
copyright = u"2020, The screenbem developers"
version = screenbem.__version__
release = screenbem.__version__

exclude_patterns = ["_build"]
pygments_style = "sphinx"

html_theme = "default"
html_static_path = ["_static"]
htmlhelp_basename = "screenbemdoc"

latex_documents = [
    ("index", "screenbem.tex", u"screenbem Documentation", u"The screenbem developers", "manual")
]
man_pages = [("index", "screenbem", u"screenbem Documentation", [u"The screenbem developers"], 1)]
texinfo_documents = [
    (
        "index",
        "screenbem",
        u"screenbem Documentation",
        u"The screenbem developers",
        "screenbem",
        "Boundary elements on multiscreens.",
        "Miscellaneous",
    )
]
