"""krel: exact workbench for norm relations, regulator constants, and local
root data of elliptic curves over Galois extensions."""

__version__ = "0.1.0"
