"""Mesh generation, beam discretization and interface surfaces"""
