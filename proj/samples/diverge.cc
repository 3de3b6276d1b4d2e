h [X0]
