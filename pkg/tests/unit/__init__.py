"""
Tests Unit package for jetnormals
"""
