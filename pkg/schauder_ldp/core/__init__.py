"""
Numerical core: dyadic bases, spectra, the Ciesielski transform, simulation and LDP quantities.
"""
