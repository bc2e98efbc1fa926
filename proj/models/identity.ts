# every step keeps the state unchanged
system identity
bool a
num x
num y
init a
init-num x = 1
init-num y = -2
transition (and (= a' a) (= x' x) (= y' y))
template octagon
