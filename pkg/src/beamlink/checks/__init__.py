"""Invariant rule engine"""
