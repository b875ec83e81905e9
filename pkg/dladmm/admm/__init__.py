"""Network state, energy terms, block subproblems and the training loop."""
