"""Well-posedness diagnostics"""
