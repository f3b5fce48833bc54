"""onticlab: a desk-scale laboratory for ontological models of
finite-dimensional quantum systems.

Subpackages: ``qcore`` (state algebra), ``onto`` (ontological models and
the structure checker), ``feasopt`` (LP feasibility, alternation, ray
search), ``bellchsh`` (two-qubit CHSH), ``dwigner`` (discrete Wigner),
``cli`` (command-line front end and file formats).
"""

__version__ = "0.1.0"
