"""
Unit tests for the Core application.
"""
