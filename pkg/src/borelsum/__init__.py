"""Borel-Laplace summation machinery for the unfolding of a singular ODE
at a confluence of two simple singular points.

Modules:
    series       formal power-series layer and system specifications
    geometry     time coordinate, strips, sectors, admissible directions
    polyops      polynomial/truncated-series helpers
    lines        sampled line/strip calculus in the Borel plane
    transforms   Borel and Laplace transforms, chi kernels, closed forms
    solver       fixed-point solver in the Borel plane, residue series
    applications center-manifold evaluation, confluence tables, linear
                 systems via a Riccati reduction, normalization data
    acceptance   end-to-end checks with measured-error reporting
    cli          command-line entry points
"""

__version__ = "0.1.0"
