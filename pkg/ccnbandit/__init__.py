# -*- coding: utf-8 -*-

__author__ = 'ccnbandit developers'
__email__ = 'ccnbandit@users.noreply.github.com'
__version__ = '0.1.0'

#: Random bit generator every run is pinned to; part of the config digest.
RNG_ALGORITHM = 'PCG64'
