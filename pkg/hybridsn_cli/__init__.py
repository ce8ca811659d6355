"""
SE-HybridSN hyperspectral image classification CLI
"""
