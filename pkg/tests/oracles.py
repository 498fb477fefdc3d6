"""Reference implementations kept deliberately separate from the package:
plain Python sets instead of bitmasks, and the reduct instead of the
two-argument operator."""
from __future__ import annotations

import itertools


def rules_of(P):
    return [(r.head, set(r.pos), set(r.neg)) for r in P.rules]


def subsets(alphabet):
    for k in range(len(alphabet) + 1):
        for combo in itertools.combinations(alphabet, k):
            yield frozenset(combo)


def psi_sets(rules, I, J):
    return frozenset(h for h, pos, neg in rules if pos <= I and not (neg & J))


def least_model(positive_rules):
    model = set()
    changed = True
    while changed:
        changed = False
        for h, pos in positive_rules:
            if pos <= model and h not in model:
                model.add(h)
                changed = True
    return frozenset(model)


def stable_models(P):
    """Gelfond-Lifschitz: I is stable iff I is the least model of the reduct P^I."""
    rules = rules_of(P)
    out = []
    for I in subsets(P.alphabet):
        reduct = [(h, pos) for h, pos, neg in rules if not (neg & I)]
        if least_model(reduct) == I:
            out.append(I)
    return out


def brute_homomorphisms(src_states, src_inputs, src_delta, tgt_states, tgt_delta):
    """All surjective state maps h with h(d(q,x)) = d'(h(q),x), identity letters."""
    found = []
    for image in itertools.product(tgt_states, repeat=len(src_states)):
        h = dict(zip(src_states, image))
        if set(image) != set(tgt_states):
            continue
        if all(h[src_delta[q, x]] == tgt_delta[h[q], x] for q in src_states for x in src_inputs):
            found.append(h)
    return found
