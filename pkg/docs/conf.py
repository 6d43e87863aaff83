# -*- coding: utf-8 -*-
#
# hankeldyn documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys
sys.path.insert(0, os.path.abspath('..'))

from datetime import datetime
year = datetime.now().year

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.doctest',
    'sphinx.ext.coverage',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'hankeldyn'
copyright = '%d, hankeldyn developers' % year
author = 'hankeldyn developers'

# The short X.Y version and the full release, read from the package.
_version = {}
with open(os.path.join(os.path.dirname(__file__), '..', 'hankeldyn', 'version.py')) as f:
    exec(f.read(), _version)
version = '.'.join(_version['__version__'].split('.')[:2])
release = _version['__version__']

language = None
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'
todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = 'alabaster'
html_theme_options = {
    'description': "Structured Hankel networks for learning dynamical systems",
    'fixed_sidebar': True,
}
html_sidebars = {
    '**': [
        'about.html',
        'navigation.html',
        'relations.html',
        'searchbox.html',
    ]
}

htmlhelp_basename = 'hankeldyndoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    (master_doc, 'hankeldyn.tex', 'hankeldyn Documentation',
     'hankeldyn developers', 'manual'),
]
