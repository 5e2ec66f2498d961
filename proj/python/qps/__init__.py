"""Projective-simulation agents on trapped ions.

Python surface of the C++ core: clip networks and flags, classical and
quantum RPS deliberation, trapped-ion pulse compilation, and the
Monte-Carlo noise experiments.
"""

from ._qps import *  # noqa: F401,F403
from ._qps import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
