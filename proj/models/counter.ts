# count up to 10, then count down by two
system counter
bool up
num i
init up
init-num i = 0
transition (or
  (and up up' (< i 10) (= i' (+ i 1)))
  (and up (not up') (>= i 10) (= i' i))
  (and (not up) (not up') (> i 0) (= i' (- i 2))))
template box
