"""
Older prime formulas with honest error bars
===========================================
"""

from millsforge import classic
from millsforge.numerics import DyadicInterval, digits
from millsforge.primality import small_primes

# Wilson: n+1 when that is prime, 2 otherwise
print("wilson:", [classic.wilson_value(n) for n in range(1, 21)])

# Gandhi: the n-th prime from a Mobius sum over primorial divisors
print("gandhi:", [classic.gandhi_prime(n) for n in range(1, 10)])

# Wright's tower.  Three known floors pin omega only to four places.
omega = classic.wright_omega_from_floors([3, 13, 16381], 128)
print()
print("omega in", omega, "->", digits(omega).text)
run = classic.wright_floors(omega, 4)
print("forward floors:", run.floors, "|", run.stopped)

# Fridman: rebuild f1 from the primes, then run it forward again
f1 = classic.fridman_backward(list(small_primes(200))[:30])
print()
print("f1 =", digits(f1).text)
run = classic.fridman_forward(f1)
print("re-emitted", len(run.floors), "primes:", run.floors[:12], "...")

# a printed 12-digit seed carries about a dozen primes before it runs out
seed = DyadicInterval.from_decimal("2.920050977316", 96, ulps=1)
run = classic.fridman_forward(seed)
print("from 2.920050977316:", run.floors)
print("amplification", run.budget.amplification, "|", run.stopped)
