"""
Command-line application package for jetnormals
"""
