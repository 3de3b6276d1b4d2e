f (g y)
