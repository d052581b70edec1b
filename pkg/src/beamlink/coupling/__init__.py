"""Beam-to-solid interface constraints"""
