"""
stabring - Ehrhart rings of stable set polytopes
"""
__version__ = '1.0.0'
