"""
Utils package for jetnormals: exceptions, validators and small helpers
"""
