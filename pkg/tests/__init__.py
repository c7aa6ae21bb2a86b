# L1 Spline Smoothing Tests
