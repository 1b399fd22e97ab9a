"""Exact finite elements for form-valued forms on simplices.

Submodules:

* ``exterior``: constant (k, l)-forms and free-group index maps
* ``bgg_ops``: the connecting maps S, S-dagger, symmetric spaces, proxies
* ``polyspaces``: polynomial forms, P_r^- and P_r bases, Koszul operator
* ``geometry``: simplices, face frames, traces and moment pairings
* ``bubbles``: bubble spaces and the N^l spaces
* ``elements``: element families, unisolvency and conformity checks
* ``meshcomplex``: meshes, DoF counts, Euler and Dehn-Sommerville audits
* ``cli``: command line front end
"""

from .elements import build_element, conformity_check, constant_element, dof_table, unisolvency_check
from .meshcomplex import SimplicialComplex, euler_audit, load_complex

__all__ = [
    "build_element",
    "conformity_check",
    "constant_element",
    "dof_table",
    "unisolvency_check",
    "SimplicialComplex",
    "euler_audit",
    "load_complex",
]
__version__ = "0.1.0"
