"""CLI tools for dladmm."""
