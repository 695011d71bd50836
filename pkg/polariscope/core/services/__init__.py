"""
Simulation, analysis and reproduction pipelines
"""
