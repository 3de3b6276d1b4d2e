let y = {io} unbox x in let z = y in box z
