"""
Configuration package for jetnormals: run configuration and logging setup
"""
