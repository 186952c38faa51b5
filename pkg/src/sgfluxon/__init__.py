"""Semiclassical sine-Gordon fluxon condensates and their universal limits.

Subpackages by concern:

* ``specfun``     -- elliptic integrals, Jacobi elliptic functions, genus-1
  Riemann theta series, and the scalar combinations built from them.
* ``laxmap``      -- spectral-plane maps E, D, Q, the phase integral, and the
  Cauchy-type functions used to build exponent functions.
* ``condensate``  -- exact N-breather evaluation via a dense linear system.
* ``gfunction``   -- endpoint conditions on the x=0 axis, the gradient
  catastrophe locator, and all constants feeding the universality formulas.
* ``painleve1``   -- the real tritronquee solution of y'' = 6y^2 + tau, its
  Hamiltonian, and the pole field.
* ``defect``      -- the closed-form two-parameter defect solutions.
* ``universality``-- assembly and comparison harness for both limit theorems.
* ``cli``         -- batch command-line front end.
"""

__version__ = "0.1.0"
