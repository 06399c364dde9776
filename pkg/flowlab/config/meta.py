"""
Overview:
    Meta information for flowlab package.
"""

#: Title of this project (should be `flowlab`).
__TITLE__ = 'flowlab'

#: Version of this project.
__VERSION__ = '0.1.0'

#: Short description of the project, will be included in ``setup.py``.
__DESCRIPTION__ = 'Numerical laboratory for mean curvature flow inside Ricci-flow ambient spaces'

#: Author of this project.
__AUTHOR__ = 'narugo1992'

#: Email of the authors'.
__AUTHOR_EMAIL__ = 'narugo992@gmail.com'
