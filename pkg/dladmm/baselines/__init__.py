"""Full-batch first-order comparison optimizers."""
