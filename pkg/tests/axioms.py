"""Random instances of the traced-PROP axioms, as pairs of terms."""

from pbsdiagrams.diagram import Empty, arity, Par, Seq, Swap, Trace, Wire, identity, sigma, trace_power

from conftest import rand_term


def _arity(rng, lo=1, hi=2):
    return int(rng.integers(lo, hi + 1))


def identity_law(rng):
    n = _arity(rng)
    d = rand_term(rng, n, "p", 1)
    if rng.integers(2):
        return Seq(identity(n), d), d
    return Seq(d, identity(n)), d


def empty_law(rng):
    d = rand_term(rng, _arity(rng), "p", 1)
    if rng.integers(2):
        return Par(Empty(), d), d
    return Par(d, Empty()), d


def seq_assoc(rng):
    n = _arity(rng)
    d1, d2, d3 = (rand_term(rng, n, p, 1) for p in "pqr")
    return Seq(Seq(d1, d2), d3), Seq(d1, Seq(d2, d3))


def par_assoc(rng):
    d1, d2, d3 = (rand_term(rng, 1, p, 1) for p in "pqr")
    return Par(Par(d1, d2), d3), Par(d1, Par(d2, d3))


def interchange(rng):
    n, m = _arity(rng), 1
    d1, d2 = rand_term(rng, n, "p", 1), rand_term(rng, n, "q", 1)
    d3, d4 = rand_term(rng, m, "r", 1), rand_term(rng, m, "s", 1)
    return Par(Seq(d1, d2), Seq(d3, d4)), Seq(Par(d1, d3), Par(d2, d4))


def swap_naturality(rng):
    n = _arity(rng)
    d = rand_term(rng, n, "p", 2)
    return Seq(Par(Wire(), d), sigma(n)), Seq(sigma(n), Par(d, Wire()))


def swap_inverse(rng):
    return Seq(Swap(), Swap()), identity(2)


def trace_input(rng):
    n = _arity(rng)
    d1, d2 = rand_term(rng, n, "p", 1), rand_term(rng, n + 1, "q", 2)
    return Trace(Seq(Par(d1, Wire()), d2)), Seq(d1, Trace(d2))


def trace_output(rng):
    n = _arity(rng)
    d1, d2 = rand_term(rng, n + 1, "p", 2), rand_term(rng, n, "q", 1)
    return Trace(Seq(d1, Par(d2, Wire()))), Seq(Trace(d1), d2)


def dinaturality(rng):
    n, m = _arity(rng, 1, 1), _arity(rng)
    d1, d2 = rand_term(rng, n + m, "p", 2), rand_term(rng, m, "q", 1)
    lhs = trace_power(Seq(d1, Par(identity(n), d2)), m)
    rhs = trace_power(Seq(Par(identity(n), d2), d1), m)
    return lhs, rhs


def superposing(rng):
    d1, d2 = rand_term(rng, _arity(rng), "p", 1), rand_term(rng, 2, "q", 2)
    return Trace(Par(d1, d2)), Par(d1, Trace(d2))


def yanking(rng):
    return Trace(Swap()), Wire()


AXIOMS = {
    "identity": identity_law,
    "empty": empty_law,
    "seq_assoc": seq_assoc,
    "par_assoc": par_assoc,
    "interchange": interchange,
    "swap_naturality": swap_naturality,
    "swap_inverse": swap_inverse,
    "trace_input": trace_input,
    "trace_output": trace_output,
    "dinaturality": dinaturality,
    "superposing": superposing,
    "yanking": yanking,
}


def wrapped(name, rng):
    """Axiom instance placed between random diagrams of the same arity."""
    lhs, rhs = AXIOMS[name](rng)
    n = arity(lhs)
    pre, post = rand_term(rng, n, "u", 1), rand_term(rng, n, "w", 1)
    return Seq(pre, Seq(lhs, post)), Seq(pre, Seq(rhs, post))
