{cap} unbox x
