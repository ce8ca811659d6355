"""
Validators module
"""
