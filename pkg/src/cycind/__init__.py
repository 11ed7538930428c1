"""Cyclic and induction proof kernel with a cyclic-to-inductive proof compiler."""
