"""
Growing a Mills chain
=====================

Each prime p forces the next one into (p**m, (p+1)**m - 1), and every prime
narrows the bracket for the constant A.  Run with ``python3 demos/mills_chain.py``.
"""

from millsforge import sequence

# m = 3 from the seed 2: the least prime in each window
state = sequence.build(3, seed=2, terms=6)
for (n, w), step in zip(state.chain, state.steps):
    print(f"p{n} = {w.value}  [{w.evidence.value}]")
    print(f"     step bracket width ~ 2^{step.width.magnitude}")

# the running bracket certifies decimal digits of A
print()
print("A =", state.certified.text)
for note in state.caveats:
    print("  caveat:", note)

# floor(A ** 3**n) gives the chain back
print()
print([sequence.recover_prime(state, n) for n in range(1, state.length + 1)] == state.primes)

# different exponent bases and seeds
for m, seed in [(2, 2), (5, 3)]:
    s = sequence.build(m, seed, 4)
    print(f"m={m} seed={seed}:", s.primes[:3], "...", s.certified.truncate(12).text)

# a state serializes to a short text record and reloads with full re-checks
text = sequence.dumps(state)
print()
print(text.splitlines()[0], "/", len(text.splitlines()), "lines")
assert sequence.loads(text).bracket == state.bracket
