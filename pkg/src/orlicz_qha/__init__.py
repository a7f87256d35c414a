"""Orlicz-space calculus with quantum-harmonic-analysis convolutions.

Subpackages:

* ``young`` -- Young / quasi-Young function families, exponents,
  interpolation algebra, explicit interpolation constants;
* ``rearrangement`` -- decreasing rearrangements and Orlicz / weak-Orlicz
  / Lp / weak-Lp norms, Jacobi singular values;
* ``phase_space`` -- sampled phase-space functions, convolution, dilation;
* ``weyl`` -- truncated Fock-space Weyl operators, quantization, the
  function/operator convolutions;
* ``verify`` -- randomized suites certifying the explicit inequalities;
* ``cli`` -- the ``orlicz-qha`` command-line front end.
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
