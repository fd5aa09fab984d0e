"""
Utility modules for the core application.
"""
