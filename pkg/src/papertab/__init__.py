"""papertab: a webcam-and-paper substitute for a graphics tablet.

Point a laptop webcam at a sheet of paper, and this library turns each
angled frame into a rectified, binarized view of the page content that
survives hand occlusion and paper movement. See ``papertab.pipeline`` for
the stage chain and ``papertab.cli`` for the command-line front end.
"""

from .kernels import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
