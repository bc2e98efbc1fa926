# accumulate a bounded input in one mode, drain it in the other
system two_mode
bool m
num x
num y
input num u
init (not m)
init-num x = 0
init-num y = 0
transition (or
  (and (not m) (not m') (<= x 5) (= x' (+ x 1)) (= y' (+ y u)) (<= 0 u) (<= u 1))
  (and (not m) m' (> x 5) (= x' x) (= y' y))
  (and m m' (>= x 1) (= x' (- x 1)) (= y' (- y 1))))
template octagon
