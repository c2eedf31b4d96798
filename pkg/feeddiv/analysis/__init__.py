# Bounds, cost of diversity and frontier sweeps
