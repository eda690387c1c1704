"""
Searching for A with floor(A ** (n+1)**2) prime
===============================================

Depth-first search with backtracking over nested brackets.
"""

from millsforge import conjecture as cj

printed = [2, 5, 17, 89, 641, 6619, 97829, 2070443]
target = "1.1966746500705764022"

# smallest prime first
result = cj.search(target_depth=12)
print("ascending:", list(result.chain))
print("nodes", result.stats.nodes, "backtracks", result.stats.backtracks)

# position 8 differs from the printed list: both primes fit, 2070433 is smaller
node = cj.bracket_for_chain(printed[:7])
print("2070433 fits:", cj.child(node, 2070433) is not None)
print("2070443 fits:", cj.child(node, 2070443) is not None)

# steering toward the printed value recovers the printed list
policy = cj.ConjecturePolicy(candidate_order="nearest_to_target", target=target)
steered = cj.search(policy, target_depth=13)
print()
print("steered:", list(steered.chain))
print("verify against", target, "->", cj.verify_chain(steered.chain, target))

# deep run: brackets shrink fast
deep = cj.search(cj.ConjecturePolicy(max_depth=40), target_depth=40)
cert = cj.certificate(deep.best)
print()
print(f"depth {deep.best.depth}: {cert.certified_count} digits")
print(cert.truncate(60).text)
print("verified:", cj.verify_chain(deep.chain, cert))
