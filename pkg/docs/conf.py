#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Sphinx configuration for the ccnbandit documentation.

import os
import sys

import sphinx_rtd_theme

# Import the package from the source tree rather than an installed copy.
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import ccnbandit  # noqa: E402

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'ccnbandit'
copyright = u'2026, ccnbandit developers'

version = ccnbandit.__version__
release = ccnbandit.__version__

exclude_patterns = ['_build']
pygments_style = 'sphinx'
autodoc_member_order = 'bysource'

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}

html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
html_static_path = []
htmlhelp_basename = 'ccnbanditdoc'

latex_documents = [
    ('index', 'ccnbandit.tex', u'ccnbandit Documentation', u'ccnbandit developers', 'manual'),
]

man_pages = [
    ('index', 'ccnbandit', u'ccnbandit Documentation', [u'ccnbandit developers'], 1),
]
