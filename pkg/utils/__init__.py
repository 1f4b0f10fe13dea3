"""
Utils package for Trotter Error Statistics Toolkit
"""
