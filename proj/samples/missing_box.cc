g y
