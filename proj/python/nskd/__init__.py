"""Device-independent key distribution against no-signaling eavesdroppers.

Thin python surface over the C++ core: conditional boxes, the Born-rule EPR
source, the four-step protocol, security-bound calculators and the LP
adversary oracle.
"""

from ._nskd import *  # noqa: F401,F403
from ._nskd import __doc__ as _core_doc  # noqa: F401
