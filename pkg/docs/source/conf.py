# Configuration file for the Sphinx documentation builder of flowlab.
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys
from datetime import datetime

from packaging import version as version_

_DOC_PATH = os.path.dirname(os.path.abspath(__file__))
_PROJ_PATH = os.path.abspath(os.path.join(_DOC_PATH, '..', '..'))
os.chdir(_PROJ_PATH)

# document the working tree, not an installed copy
sys.path.insert(0, _PROJ_PATH)
for modname in [mname for mname in sys.modules if mname.startswith('flowlab')]:
    del sys.modules[modname]

# doctests run on the cpu backend
os.environ.setdefault('JAX_PLATFORMS', 'cpu')

from flowlab.config.meta import __TITLE__, __AUTHOR__, __VERSION__  # noqa: E402

project = __TITLE__
copyright = '{year}, {author}'.format(year=datetime.now().year, author=__AUTHOR__)
author = __AUTHOR__
version = version_.parse(__VERSION__).base_version
release = __VERSION__

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.autosummary',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx.ext.githubpages',
    'sphinx.ext.todo',
    'nbsphinx',
    'sphinx_multiversion',
]

templates_path = ['_templates']
language = None
exclude_patterns = []

autodoc_member_order = 'bysource'
doctest_global_setup = 'import numpy as np'

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'flowlab'
html_static_path = ['_static']

epub_title = project
epub_exclude_files = ['search.html']

smv_tag_whitelist = r'^v.*$'
smv_branch_whitelist = r'^.*$'
smv_remote_whitelist = r'^.*$'
smv_released_pattern = r'^tags/.*$'
smv_outputdir_format = '{ref.name}'

if not os.environ.get("ENV_PROD"):
    todo_include_todos = True
    todo_emit_warnings = True
