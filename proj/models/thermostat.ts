# Thermostat with an error latch, a heater and a free-running fan button.
system thermostat

bool e      # error
bool h      # heat_on
bool f      # fan_on
num t       # room temperature
input num te  # outside temperature
choice p0
choice p1
choice p2

init (and (not e) h)
init-num t = 16

transition
(or
  (and (not p0) p1 p2 (not e) e' (= h h')
       (> t 30) (= t' t))
  (and (not p0) p1 (not p2) (not e) e' (= h h')
       (< t 15) (= t' t))
  (and p0 p1 p2 h (not h') (= e e')
       (> t 22) (<= t 30) (= t' t))
  (and p0 p1 (not p2) (not e) h (not e') h'
       (<= t 22) (<= 14 te) (<= te 19) (= t' (+ (* 15/16 t) (* 1/16 te) 1)))
  (and p0 (not p1) p2 (not e) (not h) (not e') h'
       (<= 15 t) (< t 18) (= t' t))
  (and p0 (not p1) (not p2) (not h) (not h') (= e e')
       (>= t 18) (<= 14 te) (<= te 19) (= t' (+ (* 15/16 t) (* 1/16 te)))))

template box
