"""Mixed system assembly, solution and export"""
