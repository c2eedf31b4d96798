# Per-step propagation dynamics and convergence checks
