"""Shear-deformable 3D beam elements"""
