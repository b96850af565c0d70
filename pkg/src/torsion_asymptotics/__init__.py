"""Exact coefficients of analytic torsion asymptotics under one-parameter degenerations"""
