"""
Tests package for jetnormals
"""
