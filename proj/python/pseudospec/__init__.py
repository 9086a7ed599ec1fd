"""Spectra of flat pseudo-Riemannian tori and AdS 3-manifolds under deformation."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
