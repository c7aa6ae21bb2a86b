# L1 Spline Smoothing
# Robust smoothing, denoising and inpainting of grid data with L2 and L1 splines
