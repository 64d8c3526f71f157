"""Squeezed-light power-recycled Michelson noise simulator"""

__version__ = '1.0.0'
