"""
Core modules for polariscope
"""
