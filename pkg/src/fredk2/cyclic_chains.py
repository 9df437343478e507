"""Chain-level homological algebra for matrix-valued simplices.

Smooth simplices sigma: Delta^n -> GL_m for n in {1, 2}, the normalized
boundary dN whose zeroth face is right-translated back to the base point,
the logarithm gamma_log sending a simplex to a cyclic chain, the cyclic
operators b and t with the symmetrization projector, the odd cocycles
tau_{2p-1} on 2x2 block algebras, and the relative logarithm tilde_gamma
of a pair of paths whose pointwise difference is trace class.

Degree-0 chains are formal sums of group elements; the boundary of a
1-simplex is -sigma(0) + sigma(1)sigma(1)^{-1}, which vanishes for based
loops.  Entries of a simplex may be dense complex matrices or operator
objects carrying mul/inv/add/scalar_mul/op_trace (windowed Toeplitz
elements); chains materialize only over dense matrices.

Sign conventions are fixed by the defining integral of gamma_log,
including its (-1)^n prefactor, and every identity in the tests is stated
against that convention.
"""

import math

import numpy as np
from scipy.special import roots_legendre

from ._errors import InputError, InvariantViolation, NumericalError

LINE_ORDER = 32
LINE_MAX_ORDER = 512
TRI_ORDER = 32
TRI_MAX_ORDER = 128
LINE_TOL = 1e-11
TRI_TOL = 1e-9
CHAIN_TOL = 1e-10


def _gl_unit(order):
    x, w = roots_legendre(order)
    return 0.5 * (x + 1.0), 0.5 * w


def _is_mat(x):
    return isinstance(x, np.ndarray)


def _e_mul(x, y):
    if _is_mat(x) and _is_mat(y):
        return x @ y
    return x.mul(y)


def _e_add(x, y):
    if _is_mat(x) and _is_mat(y):
        return x + y
    return x.add(y)


def _e_sub(x, y):
    if _is_mat(x) and _is_mat(y):
        return x - y
    return x.sub(y)


def _e_scale(c, x):
    if _is_mat(x):
        return c * x
    return x.scalar_mul(c)


def _e_inv(x):
    if _is_mat(x):
        try:
            return np.linalg.inv(x)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("singular simplex value at a quadrature node") from exc
    return x.inv()


def _e_trace(x):
    if _is_mat(x):
        return complex(np.trace(x))
    return x.op_trace()


class SimplexPath:
    """C^2 map from the n-simplex into invertible m x m elements.

    value is a callable of n floats; partials is either None (fourth-order
    central differences, requiring value to extend slightly past the
    simplex), a callable (i, *t) for i in 1..n, or a tuple of per-variable
    callables.  based asserts sigma(0) = 1.
    """

    def __init__(self, dimension, value, partials=None, based=True, fd_step=1e-4):
        if dimension not in (1, 2):
            raise InputError("simplex dimension must be 1 or 2")
        self.n = dimension
        self._value = value
        if partials is None or callable(partials):
            self._partials = partials
        else:
            ps = tuple(partials)
            if len(ps) != dimension:
                raise InputError("one partial per simplex coordinate required")
            self._partials = lambda i, *t: ps[i - 1](*t)
        self.based = bool(based)
        self.fd_step = float(fd_step)
        if self.based:
            v0 = self.at(*([0.0] * self.n))
            if _is_mat(v0):
                m = v0.shape[0]
                if np.linalg.norm(v0 - np.eye(m)) > 1e-9 * max(1.0, np.linalg.norm(v0)):
                    raise InputError("based simplex must start at the identity")

    def at(self, *t):
        return self._value(*t)

    def partial(self, i, *t):
        if not 1 <= i <= self.n:
            raise InputError("partial index out of range")
        if self._partials is not None:
            return self._partials(i, *t)
        h = self.fd_step

        def shifted(d):
            u = list(t)
            u[i - 1] += d
            return self._value(*u)

        far = _e_sub(shifted(-2.0 * h), shifted(2.0 * h))
        near = _e_sub(shifted(h), shifted(-h))
        return _e_scale(1.0 / (12.0 * h), _e_add(far, _e_scale(8.0, near)))

    def vertex(self, k):
        pts = ((0.0,), (1.0,)) if self.n == 1 else ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
        if not 0 <= k <= self.n:
            raise InputError("vertex index out of range")
        return self.at(*pts[k])


def face(i, sigma):
    """Face map d_i; faces of a 1-simplex are point values.

    d_i for i >= 1 sets coordinate i to zero; d_0 substitutes the missing
    barycentric coordinate, so for n = 2 it is t -> sigma(1 - t, t).
    """
    if not isinstance(sigma, SimplexPath):
        raise InputError("face expects a simplex")
    n = sigma.n
    if not 0 <= i <= n:
        raise InputError("face index out of range")
    if n == 1:
        return sigma.at(1.0) if i == 0 else sigma.at(0.0)
    if i == 0:
        val = lambda t: sigma.at(1.0 - t, t)
        part = lambda _j, t: _e_sub(sigma.partial(2, 1.0 - t, t),
                                    sigma.partial(1, 1.0 - t, t))
        return SimplexPath(1, val, part, based=False)
    if i == 1:
        val = lambda t: sigma.at(0.0, t)
        part = lambda _j, t: sigma.partial(2, 0.0, t)
    else:
        val = lambda t: sigma.at(t, 0.0)
        part = lambda _j, t: sigma.partial(1, t, 0.0)
    return SimplexPath(1, val, part, based=sigma.based)


def based_zero_face(sigma):
    """d_0(sigma) right-translated by sigma(1-vertex)^{-1}."""
    g = _e_inv(sigma.vertex(1))
    if sigma.n == 1:
        return _e_mul(face(0, sigma), g)
    f0 = face(0, sigma)
    val = lambda t: _e_mul(f0.at(t), g)
    part = lambda _j, t: _e_mul(f0.partial(1, t), g)
    return SimplexPath(1, val, part, based=sigma.based)


class FormalChain:
    """Formal complex combination of simplices, or of group elements in
    dimension zero."""

    def __init__(self, dimension, terms=()):
        self.n = int(dimension)
        self.terms = [(complex(c), s) for c, s in terms]

    def scaled(self, c):
        return FormalChain(self.n, [(c * co, s) for co, s in self.terms])

    def plus(self, other):
        if other.n != self.n:
            raise InputError("chain dimensions differ")
        return FormalChain(self.n, self.terms + other.terms)

    def materialize(self):
        if self.n != 0:
            raise InputError("only dimension-0 chains materialize")
        total = None
        for c, g in self.terms:
            piece = _e_scale(c, g)
            total = piece if total is None else _e_add(total, piece)
        return total


def dN(sigma):
    """Boundary sum_{i>=1} (-1)^i d_i + (zeroth face translated to base)."""
    if isinstance(sigma, FormalChain):
        out = None
        for c, s in sigma.terms:
            piece = dN(s).scaled(c)
            out = piece if out is None else out.plus(piece)
        if out is None:
            raise InputError("empty chain has no boundary dimension")
        return out
    terms = [(float((-1) ** i), face(i, sigma)) for i in range(1, sigma.n + 1)]
    terms.append((1.0, based_zero_face(sigma)))
    return FormalChain(sigma.n - 1, terms)


class CyclicChain:
    """Formal combination of elementary (q+1)-fold tensors of m x m
    matrices; equality is tested after cyclic symmetrization."""

    def __init__(self, degree, terms=()):
        self.degree = int(degree)
        self.terms = []
        for c, x in terms:
            x = tuple(x)
            if len(x) != self.degree + 1:
                raise InputError("tensor length must be degree + 1")
            self.terms.append((complex(c), x))

    def scaled(self, c):
        return CyclicChain(self.degree, [(c * co, x) for co, x in self.terms])

    def plus(self, other):
        if other.degree != self.degree:
            raise InputError("chain degrees differ")
        return CyclicChain(self.degree, self.terms + other.terms)

    def minus(self, other):
        return self.plus(other.scaled(-1.0))

    def materialize(self):
        """Sum of coeff * kron(x^0, ..., x^q); the kron embedding is a
        linear isomorphism onto M_{m^(q+1)}, so this is faithful."""
        total = None
        for c, x in self.terms:
            if not all(_is_mat(e) for e in x):
                raise InputError("only dense matrix chains materialize")
            piece = x[0]
            for e in x[1:]:
                piece = np.kron(piece, e)
            piece = c * piece
            total = piece if total is None else total + piece
        return total

    def project(self):
        return cyclic_project(self)

    def equals(self, other, tol=CHAIN_TOL):
        if other.degree != self.degree:
            return False
        a = self.project().materialize()
        b = other.project().materialize()
        if a is None and b is None:
            return True
        if a is None or b is None:
            present = a if a is not None else b
            return np.linalg.norm(present) <= tol
        if a.shape != b.shape:
            return False
        scale = max(1.0, np.linalg.norm(a), np.linalg.norm(b))
        return np.linalg.norm(a - b) <= tol * scale


def cyclic_t(c):
    """t(a_0 x ... x a_q) = (-1)^q a_q x a_0 x ... x a_{q-1}."""
    sign = float((-1) ** c.degree)
    return CyclicChain(c.degree,
                       [(sign * co, (x[-1],) + x[:-1]) for co, x in c.terms])


def cyclic_project(c):
    """Average of the signed cyclic action, the computable model of the
    quotient by (1 - t)."""
    out = []
    cur = c
    for _ in range(c.degree + 1):
        out.extend(cur.terms)
        cur = cyclic_t(cur)
    frac = 1.0 / (c.degree + 1.0)
    return CyclicChain(c.degree, [(frac * co, x) for co, x in out])


def cyclic_b(c):
    """b(a_0 x ... x a_q) = sum (-1)^i a_0 x ... x a_i a_{i+1} x ... x a_q
    + (-1)^q a_q a_0 x a_1 x ... x a_{q-1}."""
    q = c.degree
    if q == 0:
        return CyclicChain(0, [])
    out = []
    for co, x in c.terms:
        for i in range(q):
            merged = x[:i] + (_e_mul(x[i], x[i + 1]),) + x[i + 2:]
            out.append((co * (-1) ** i, merged))
        out.append((co * (-1) ** q, (_e_mul(x[q], x[0]),) + x[1:q]))
    return CyclicChain(q - 1, out)


def _line_matrix_integral(fn, tol=LINE_TOL):
    """Adaptive Gauss-Legendre integral of a matrix-valued function on
    [0, 1]."""

    def at_order(order):
        nodes, weights = _gl_unit(order)
        total = None
        for t, w in zip(nodes, weights):
            piece = w * fn(float(t))
            total = piece if total is None else total + piece
        return total

    prev = at_order(LINE_ORDER)
    order = 2 * LINE_ORDER
    while order <= LINE_MAX_ORDER:
        cur = at_order(order)
        if np.linalg.norm(cur - prev) <= tol * max(1.0, np.linalg.norm(cur)):
            return cur
        prev = cur
        order *= 2
    raise NumericalError("path quadrature did not converge")


def _logderiv_factory(sigma):
    def logderiv(t):
        f = sigma.at(t)
        fp = sigma.partial(1, t)
        try:
            return np.linalg.solve(f.T, fp.T).T
        except np.linalg.LinAlgError as exc:
            raise NumericalError("singular simplex value at a quadrature node") from exc
    return logderiv


def _path_endpoint_check(sigma, integral_trace):
    # exp(tr integral of sigma' sigma^{-1}) = det sigma(1)/det sigma(0) on
    # any path inside the invertibles; a crossing can cancel in symmetric
    # quadrature yet break this identity.
    s0, la0 = np.linalg.slogdet(sigma.at(0.0))
    s1, la1 = np.linalg.slogdet(sigma.at(1.0))
    if s0 == 0 or s1 == 0 or not (np.isfinite(la0) and np.isfinite(la1)):
        raise NumericalError("path leaves invertibles")
    if abs(integral_trace.real - (la1 - la0)) > 1e-6 * max(1.0, abs(la1 - la0)):
        raise NumericalError("path leaves invertibles")
    if abs(np.exp(1j * integral_trace.imag) - s1 / s0) > 1e-6:
        raise NumericalError("path leaves invertibles")


def gamma_log(sigma, tol=TRI_TOL):
    """Logarithm of a based simplex as a cyclic chain.

    Defined by ((-1)^n / n!) sum over permutations s of sgn(s) times the
    integral over the simplex of the tensor of log-derivatives in the
    order prescribed by s.  For n = 1 this is the degree-0 chain
    -integral of sigma' sigma^{-1}; for n = 2 the degree-1 chain
    (1/2)(integral of A x B - integral of B x A) with A, B the two
    log-derivatives, evaluated as a node sum over a collapsed-square
    Gauss grid with adaptive doubling.
    """
    if isinstance(sigma, FormalChain):
        if sigma.n != 1:
            raise InputError("linear extension is defined on 1-simplex chains")
        out = None
        for c, s in sigma.terms:
            piece = gamma_log(s, tol=tol).scaled(c)
            out = piece if out is None else out.plus(piece)
        return out if out is not None else CyclicChain(0, [])
    if not sigma.based:
        raise InputError("logarithm requires a based simplex")
    probe = sigma.at(*([0.0] * sigma.n))
    if not _is_mat(probe):
        raise InputError("logarithm is defined for dense matrix simplices")

    if sigma.n == 1:
        logderiv = _logderiv_factory(sigma)
        integral = _line_matrix_integral(logderiv)
        _path_endpoint_check(sigma, complex(np.trace(integral)))
        return CyclicChain(0, [(1.0, (-integral,))])

    def triangle_chain(order):
        nodes, weights = _gl_unit(order)
        terms = []
        for u, wu in zip(nodes, weights):
            for v, wv in zip(nodes, weights):
                t1 = float(u)
                t2 = float(v * (1.0 - u))
                w = float(wu * wv * (1.0 - u))
                f = sigma.at(t1, t2)
                try:
                    finv = np.linalg.inv(f)
                except np.linalg.LinAlgError as exc:
                    raise NumericalError(
                        "singular simplex value at a quadrature node") from exc
                a = sigma.partial(1, t1, t2) @ finv
                b = sigma.partial(2, t1, t2) @ finv
                terms.append((0.5 * w, (a, b)))
                terms.append((-0.5 * w, (b, a)))
        return CyclicChain(1, terms)

    prev = triangle_chain(TRI_ORDER)
    prev_mat = prev.materialize()
    order = 2 * TRI_ORDER
    while order <= TRI_MAX_ORDER:
        cur = triangle_chain(order)
        cur_mat = cur.materialize()
        if np.linalg.norm(cur_mat - prev_mat) <= tol * max(1.0, np.linalg.norm(cur_mat)):
            return cur
        prev, prev_mat = cur, cur_mat
        order *= 2
    raise NumericalError("triangle quadrature did not converge")


class Block2:
    """2x2 block element over dense matrices or windowed operators."""

    def __init__(self, b11, b12, b21, b22):
        self._b = ((b11, b12), (b21, b22))

    def block(self, i, j):
        return self._b[i - 1][j - 1]

    def mul(self, other):
        rows = []
        for i in (1, 2):
            row = []
            for j in (1, 2):
                s = _e_add(_e_mul(self.block(i, 1), other.block(1, j)),
                           _e_mul(self.block(i, 2), other.block(2, j)))
                row.append(s)
            rows.append(row)
        return Block2(rows[0][0], rows[0][1], rows[1][0], rows[1][1])

    def add(self, other):
        return Block2(*[_e_add(self.block(i, j), other.block(i, j))
                        for i in (1, 2) for j in (1, 2)])

    def sub(self, other):
        return Block2(*[_e_sub(self.block(i, j), other.block(i, j))
                        for i in (1, 2) for j in (1, 2)])

    def scalar_mul(self, c):
        return Block2(*[_e_scale(c, self.block(i, j))
                        for i in (1, 2) for j in (1, 2)])

    def dense(self):
        return np.block([[self.block(1, 1), self.block(1, 2)],
                         [self.block(2, 1), self.block(2, 2)]])


def tau_cocycle(p, chain):
    """Odd cyclic cocycle on 2x2 block elements.

    tau_{2p-1}(x^0 x ... x x^{2p-1}) = (-1)^{p-1} (2p-1)!/(p-1)! times
    Tr(diag(1,-1) offdiag(x^0) ... offdiag(x^{2p-1})); the product of the
    2p off-diagonal parts is block diagonal, so this is the trace of the
    (1,1) corner minus the trace of the (2,2) corner.
    """
    p = int(p)
    if p < 1 or chain.degree != 2 * p - 1:
        raise InputError("cocycle degree must be 2p−1")
    pref = float((-1) ** (p - 1)) * math.factorial(2 * p - 1) / math.factorial(p - 1)
    total = 0j
    for co, x in chain.terms:
        top = x[0].block(1, 2)
        bot = x[0].block(2, 1)
        for k in range(1, 2 * p):
            el = x[k]
            if k % 2 == 1:
                top = _e_mul(top, el.block(2, 1))
                bot = _e_mul(bot, el.block(1, 2))
            else:
                top = _e_mul(top, el.block(1, 2))
                bot = _e_mul(bot, el.block(2, 1))
        total += co * (_e_trace(top) - _e_trace(bot))
    return pref * total


def _line_scalar_integral(fn, tol=LINE_TOL):
    def at_order(order):
        nodes, weights = _gl_unit(order)
        return complex(sum(w * fn(float(t)) for t, w in zip(nodes, weights)))

    prev = at_order(LINE_ORDER)
    order = 2 * LINE_ORDER
    while order <= LINE_MAX_ORDER:
        cur = at_order(order)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
        order *= 2
    raise NumericalError("path quadrature did not converge")


def _paths_compatible(s1, s2):
    for t in (0.0, 0.37, 1.0):
        a = s1.at(t)
        b = s2.at(t)
        if _is_mat(a) != _is_mat(b):
            raise InputError("paths do not agree modulo trace class")
        if _is_mat(a):
            if a.shape != b.shape:
                raise InputError("paths do not agree modulo trace class")
        else:
            if a.symbol.sub(b.symbol).l1() > 1e-9:
                raise InputError("paths do not agree modulo trace class")


def tilde_gamma(s1, s2, tol=1e-9):
    """Relative logarithm of a pair of paths with trace class difference.

    Evaluates both displayed forms,
      -Tr integral of d(s1 s2^{-1})/dt . s2 s1^{-1} dt   and
      Tr integral of (s2' s2^{-1} - s1' s1^{-1}) dt,
    checks they agree to tol, and returns the common value.
    """
    if not (isinstance(s1, SimplexPath) and isinstance(s2, SimplexPath)):
        raise InputError("relative logarithm expects two paths")
    if s1.n != 1 or s2.n != 1:
        raise InputError("relative logarithm is defined for 1-simplices")
    _paths_compatible(s1, s2)

    def form_product(t):
        f1 = s1.at(t)
        f2 = s2.at(t)
        f1p = s1.partial(1, t)
        f2p = s2.partial(1, t)
        inv1 = _e_inv(f1)
        inv2 = _e_inv(f2)
        # d/dt (s1 s2^{-1}) = s1' s2^{-1} - s1 s2^{-1} s2' s2^{-1}
        deriv = _e_sub(_e_mul(f1p, inv2),
                       _e_mul(_e_mul(_e_mul(f1, inv2), f2p), inv2))
        prod = _e_mul(deriv, _e_mul(f2, inv1))
        return -_e_trace(prod)

    def form_difference(t):
        d2 = _e_mul(s2.partial(1, t), _e_inv(s2.at(t)))
        d1 = _e_mul(s1.partial(1, t), _e_inv(s1.at(t)))
        return _e_trace(_e_sub(d2, d1))

    try:
        val_a = _line_scalar_integral(form_product)
        val_b = _line_scalar_integral(form_difference)
    except InvariantViolation as exc:
        # a nonzero-symbol trace inside either form means the paths differ
        # by more than trace class
        raise InputError("paths do not agree modulo trace class") from exc
    if abs(val_a - val_b) > tol * max(1.0, abs(val_a), abs(val_b)):
        raise InvariantViolation("relative logarithm forms disagree")
    return val_b
