"""
Schauder LDP package.

Ciesielski's isomorphism for Hilbert-space-valued paths, Q-Wiener simulation by
Schauder series, and numerical checks of the small-noise large deviation principle.
"""

__version__ = "1.0.0"
