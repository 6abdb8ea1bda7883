"""Hand-built FBASs shared by the test modules."""

from fbas_rewards import Fbas, QuorumSet, gen_organizational, gen_symmetric


def five_node():
    """Five nodes: 0 needs 3 of everyone, {1,2} need 3 of {0,1,2}, {3,4} need 3 of {0,3,4}."""
    left = QuorumSet(3, (0, 1, 2))
    right = QuorumSet(3, (0, 3, 4))
    return Fbas((QuorumSet(3, (0, 1, 2, 3, 4)), left, left, right, right),
                tuple(f"n{i}" for i in range(5)))


def add_leaves(fbas, k, qset=None):
    """Append ``k`` nodes nobody depends on; by default they copy node 0's quorum set."""
    qset = qset or fbas.quorum_sets[0]
    n = len(fbas)
    aliases = fbas.aliases + tuple(f"leaf{n + j}" for j in range(k))
    return Fbas(fbas.quorum_sets + (qset,) * k, aliases)


def five_node_plus_dependent():
    return add_leaves(five_node(), 1, QuorumSet(3, (0, 1, 2)))


def disjoint_groups():
    """{0,1,2} and {3,4,5}, each needing any 2 of its own group."""
    a = QuorumSet(2, (0, 1, 2))
    b = QuorumSet(2, (3, 4, 5))
    return Fbas((a, a, a, b, b, b))


def chain():
    """Top tier {0,1,2} plus nodes trusting a mix of top tier and each other."""
    top = QuorumSet(2, (0, 1, 2))
    return Fbas((top, top, top,
                 QuorumSet(2, (0, 1, 4)),
                 QuorumSet(1, (), (QuorumSet(2, (0, 1, 2)), QuorumSet(1, (3,)))),
                 QuorumSet(2, (3, 4))))


def small_family():
    """Test FBASs with at most 12 nodes: both generated families plus hand-built ones."""
    cases = {f"symmetric-{n}": gen_symmetric(n) for n in range(1, 13)}
    cases.update({f"organizational-{m}": gen_organizational(m) for m in range(1, 5)})
    cases["five_node"] = five_node()
    cases["five_node+node5"] = five_node_plus_dependent()
    cases["five_node+3leaves"] = add_leaves(five_node(), 3)
    cases["symmetric-5+leaf"] = add_leaves(gen_symmetric(5), 1)
    cases["organizational-2+3leaves"] = add_leaves(gen_organizational(2), 3)
    cases["chain"] = chain()
    return cases
