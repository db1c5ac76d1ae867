"""cellcover: exact toolkit for cellular covers of finite-rank torsion-free abelian groups."""

__version__ = "1.0.0"
