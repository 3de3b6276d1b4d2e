# box written out by hand
let b = box y in
let p = pid [Box {io} Top] in
let r = p b in
g r
