"""lindyn: finite-dimensional experiments in the linear dynamics of sets of operators."""
