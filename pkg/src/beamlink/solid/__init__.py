"""Linear isotropic elasticity on hex8 meshes"""
