"""
Constants seeded at a Mersenne prime
====================================

With p_1 = 2**p - 1 the constant A satisfies

    p*log(2)/m - 2/(m*2**p)  <  log A  <  p*log(2)/m

so its first few million digits follow from p alone.  Nothing here builds
the 23-million-digit seed.
"""

import time

from millsforge import theorem
from millsforge.errors import HorizonError

p = 77232917

t = time.perf_counter()
report = theorem.constant_digits(p, 10**10, 60)
print(f"m = 10^10: {report.text}  ({time.perf_counter() - t:.2f} s)")
print("horizon:", report.horizon, "digits")
print("unconditional:", report.unconditional)

# m = 3^13 is a small exponent base, so A is about 3.8e14
print("m = 3^13:", theorem.constant_digits(p, 3**13, 28).text)

# every known Mersenne exponent gives its own constant
print("p = 82589933:", theorem.constant_digits(82589933, 10**10, 30).text)

# the digit horizon grows with p
for q in (13, 127, 521, 4423):
    print(f"horizon(2^{q}-1, m=7) = {theorem.horizon(q, 7)}")

# asking past it is refused, not padded
try:
    theorem.constant_digits(521, 7, 500)
except HorizonError as exc:
    print("refused:", exc)

# log-domain digits carry over to A
a1 = report.a_bracket
check = theorem.precision_transfer_check(a1, a1)
print("transfer inequality holds at equality:", check.holds)
