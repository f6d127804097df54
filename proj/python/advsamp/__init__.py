"""Uncertainty-driven adversarial sampling for model committees.

The heavy lifting lives in the compiled extension ``advsamp._advsamp``; this
package re-exports its public names so ``import advsamp`` is enough.
"""

from advsamp._advsamp import *  # noqa: F401,F403
from advsamp._advsamp import __doc__ as _core_doc  # noqa: F401
