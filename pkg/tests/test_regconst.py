"""Regulator constants: permutation route, matrix route, and their interplay."""

import random
from fractions import Fraction

import pytest

from krel.characters import perm_character, rational_irreducibles
from krel.exactmath import is_norm_from_quadratic, rat_det
from krel.groups import (
    alternating4_group,
    burnside_add,
    burnside_res,
    cyclic_group,
    dihedral_group,
    metacyclic_group,
    quaternion_group,
    subgroup_as_group,
    subgroup_rep,
)
from krel.regconst import (
    DegeneratePairingError,
    MatrixRep,
    PermVirtualRep,
    invariant_pairing,
    matrix_fixed_det,
    minimal_perm_multiple,
    perm_fixed_det,
    perm_matrix_rep,
    reg_const_matrix,
    reg_const_perm,
    reg_const_rational_irr,
)
from krel.relations import Const, EF, LocalFn, eval_localfn, eval_on_theta, \
    is_trivial_on_k_relations, k_relation_basis

D21_THETA = {"2.1": 1, "6.1": -1, "14.1": -1, "42.1": 1}

# quaternion left multiplication by i and j on the basis (1, i, j, k)
QUAT_I = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
QUAT_J = [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]


def identity_matrix(n):
    return [[Fraction(i == j) for j in range(n)] for i in range(n)]


def is_cyclic_class(G, cls):
    rep = cls.representative
    return any(G.element_order(x) == len(rep) for x in rep)


def tau_by_label(G, label):
    return next(t for t in rational_irreducibles(G) if t.label == label)


def random_lattice_elements(lat, rng, count=4):
    out = []
    for _ in range(count):
        theta = {}
        for b in rng.sample(lat.basis, k=min(3, len(lat.basis))):
            c = rng.randint(-2, 2)
            if c:
                theta = burnside_add(theta, {k: c * v for k, v in b.items()})
        out.append(theta)
    return out


def push_to_standalone(G, dsub, sub, to_sub, theta_sub_lattice):
    out = {}
    for cid, coeff in theta_sub_lattice.items():
        rep = next(c.representative for c in G.sub_lattice(dsub) if c.id == cid)
        image = frozenset(to_sub[h] for h in rep)
        key = sub.classify_subgroup(image).id
        out[key] = out.get(key, 0) + coeff
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# perm_fixed_det


def test_perm_fixed_det_s3_example():
    S3 = dihedral_group(3)
    assert perm_fixed_det(S3, "2.1", "2.1") == Fraction(1, 2)

    # independent oracle: the coset space of C_2 has three points, H-orbit
    # sums give a basis of the fixed space, and the scaled Gram determinant
    # is computed literally
    h = subgroup_rep(S3, "2.1")
    cosets, coset_of = [], {}
    for x in range(S3.order):
        if x in coset_of:
            continue
        k = len(cosets)
        cosets.append(x)
        for t in h:
            coset_of[S3.mul(x, t)] = k
    orbits = []
    placed = set()
    for k, x in enumerate(cosets):
        if k in placed:
            continue
        orb = {coset_of[S3.mul(g, x)] for g in h}
        placed |= orb
        orbits.append(orb)
    vecs = [[Fraction(j in orb) for j in range(len(cosets))] for orb in orbits]
    gram = [[Fraction(1, len(h)) * sum(a[i] * b[i] for i in range(len(cosets)))
             for b in vecs] for a in vecs]
    assert rat_det(gram) == Fraction(1, 2)


@pytest.mark.parametrize("maker", [
    lambda: dihedral_group(3), lambda: cyclic_group(6),
    quaternion_group, alternating4_group])
def test_perm_fixed_det_identities(maker):
    G = maker()
    classes = G.subgroup_classes()
    bottom, top = classes[0].id, classes[-1].id
    assert perm_fixed_det(G, bottom, bottom) == 1
    assert perm_fixed_det(G, top, top) == Fraction(1, G.order)
    assert perm_fixed_det(G, bottom, top) == 1


# ---------------------------------------------------------------------------
# minimal_perm_multiple


def test_minimal_perm_multiple_d21():
    G = dihedral_group(21)
    expected = {
        "tau_1": {"42.1": 1},
        "tau_2": {"21.1": 1, "42.1": -1},
        "tau_3": {"14.1": 1, "42.1": -1},
        "tau_4": {"6.1": 1, "42.1": -1},
        "tau_5": {"2.1": 1, "6.1": -1, "14.1": -1, "42.1": 1},
    }
    for t in rational_irreducibles(G):
        k, exp = minimal_perm_multiple(G, t)
        assert k == 1
        assert exp.coeffs == expected[t.label]
        # the defining property, checked on characters
        assert exp.character(G) == t.sum_values


def test_minimal_perm_multiple_q8():
    Q8 = quaternion_group()
    t = next(t for t in rational_irreducibles(Q8)
             if t.sum_values.degree() == 2)
    k, exp = minimal_perm_multiple(Q8, t)
    assert k == 2
    assert exp.coeffs == {"1.1": 1, "2.1": -1}
    assert exp.character(Q8) == 2 * t.sum_values


def test_minimal_perm_multiple_trivial_and_c4():
    S3 = dihedral_group(3)
    k, exp = minimal_perm_multiple(S3, tau_by_label(S3, "tau_1"))
    assert (k, exp.coeffs) == (1, {"6.1": 1})

    C4 = cyclic_group(4)
    t = next(t for t in rational_irreducibles(C4)
             if t.sum_values.degree() == 2)
    k, exp = minimal_perm_multiple(C4, t)
    assert (k, exp.coeffs) == (1, {"1.1": 1, "2.1": -1})


def test_minimal_perm_multiple_rejects_irrational():
    C4 = cyclic_group(4)
    t = next(t for t in rational_irreducibles(C4)
             if t.sum_values.degree() == 2)
    with pytest.raises(ValueError):
        minimal_perm_multiple(C4, t.constituent)


# ---------------------------------------------------------------------------
# reg_const_perm


def test_reg_const_perm_d21_golden():
    G = dihedral_group(21)
    raws = {}
    for t in rational_irreducibles(G):
        _, exp = minimal_perm_multiple(G, t)
        raws[t.label] = reg_const_perm(G, D21_THETA, exp, 21)
    assert raws["tau_1"].raw == 1
    assert raws["tau_2"].raw == 1
    assert raws["tau_3"].raw == 7
    assert raws["tau_4"].raw == 27
    assert raws["tau_5"].raw == Fraction(1, 189)
    # square classes modulo norms from Q(sqrt(21)): (1, 1, 1, 3, 3)
    for label in ("tau_1", "tau_2", "tau_3"):
        assert raws[label].is_norm()
    for label in ("tau_4", "tau_5"):
        assert not raws[label].is_norm()
        assert is_norm_from_quadratic(raws[label].raw / 3, 21)
    # dihedral p=3, q=7 pattern: value on the degree-(p-1) piece is q^((p-1)/2)
    assert raws["tau_3"].raw == 7 ** ((3 - 1) // 2)


def test_reg_const_perm_validates():
    G = dihedral_group(21)
    with pytest.raises(ValueError):
        reg_const_perm(G, {"2.1": 1, "42.1": -1}, {"42.1": 1}, 21)
    with pytest.raises(ValueError):
        reg_const_perm(G, D21_THETA, {"42.1": 1}, 20)
    v = reg_const_perm(G, {}, {"6.1": 3}, 21)
    assert v.raw == 1 and v.is_norm()


def test_reg_const_value_field_mismatch():
    G = dihedral_group(21)
    Q8 = quaternion_group()
    a = reg_const_perm(G, D21_THETA, {"42.1": 1}, 21)
    b = reg_const_perm(Q8, {"1.1": 1, "2.1": -1}, {"8.1": 1}, -1)
    with pytest.raises(ValueError):
        a.same_mod_norms(b)


# ---------------------------------------------------------------------------
# reg_const_rational_irr routing


def test_rational_irr_odd_multiple_uses_perm_route():
    G = dihedral_group(21)
    v = reg_const_rational_irr(G, D21_THETA, tau_by_label(G, "tau_3"), 21)
    assert v.raw == 7 and v.is_norm()

    # C_4: the faithful rational character has Frobenius-Schur indicator 0
    # on its constituent but k = 1, so the perm value must come back verbatim
    C4 = cyclic_group(4)
    t = next(t for t in rational_irreducibles(C4)
             if t.sum_values.degree() == 2)
    _, exp = minimal_perm_multiple(C4, t)
    direct = reg_const_perm(C4, {"1.1": 1, "2.1": -1}, exp, -1)
    routed = reg_const_rational_irr(C4, {"1.1": 1, "2.1": -1}, t, -1)
    assert routed.raw == direct.raw


def test_rational_irr_symplectic_gives_one():
    Q8 = quaternion_group()
    t = next(t for t in rational_irreducibles(Q8)
             if t.sum_values.degree() == 2)
    v = reg_const_rational_irr(Q8, {"1.1": 1, "2.1": -1}, t, -1)
    assert v.raw == 1


def test_rational_irr_needs_constituent_on_even_multiple():
    Q8 = quaternion_group()
    t = next(t for t in rational_irreducibles(Q8)
             if t.sum_values.degree() == 2)
    with pytest.raises(ValueError):
        reg_const_rational_irr(Q8, {"1.1": 1, "2.1": -1}, t.sum_values, -1)


# ---------------------------------------------------------------------------
# matrix models


def test_matrix_rep_quaternion_model():
    Q8 = quaternion_group()
    rep = MatrixRep(Q8, [QUAT_I, QUAT_J])
    assert rep.dimension == 4
    vals = [v.rational_value() for v in rep.character().values]
    assert sorted(vals) == [-4, 0, 0, 0, 4]


def test_matrix_rep_rejects_bad_images():
    Q8 = quaternion_group()
    # right multiplication by j is an anti-homomorphism, not a homomorphism
    wrong_j = [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]]
    with pytest.raises(ValueError):
        MatrixRep(Q8, [QUAT_I, wrong_j])
    C3 = cyclic_group(3)
    with pytest.raises(ValueError):
        MatrixRep(C3, [[[Fraction(-1)]]])
    with pytest.raises(ValueError):
        MatrixRep(Q8, [QUAT_I])
    with pytest.raises(ValueError):
        MatrixRep(Q8, [QUAT_I, [[1, 0], [0, 1]]])


def test_matrix_rep_factoring_through_quotient_is_fine():
    # C_4 -> {+-1} kills the squares; a legal model, just not faithful
    C4 = cyclic_group(4)
    rep = MatrixRep(C4, [[[Fraction(-1)]]])
    assert rep.dimension == 1
    assert rep.character().is_rational()


@pytest.mark.parametrize("maker,cid", [
    (lambda: dihedral_group(3), "2.1"),
    (quaternion_group, "4.1"),
    (lambda: dihedral_group(21), "14.1"),
])
def test_perm_matrix_rep_character(maker, cid):
    G = maker()
    rep = perm_matrix_rep(G, cid)
    assert rep.character() == perm_character(G, subgroup_rep(G, cid))


def test_invariant_pairing_properties():
    Q8 = quaternion_group()
    rep = MatrixRep(Q8, [QUAT_I, QUAT_J])
    q = invariant_pairing(rep, seed=3)
    n = rep.dimension
    assert all(q[i][j] == q[j][i] for i in range(n) for j in range(n))
    assert rat_det(q) != 0
    for g in range(Q8.order):
        m = rep.at(g)
        conj = [[sum(m[a][i] * q[a][b] * m[b][j] for a in range(n)
                     for b in range(n)) for j in range(n)] for i in range(n)]
        assert conj == q
    assert invariant_pairing(rep, seed=3) == q


def test_pairing_validation():
    C2 = cyclic_group(2)
    rep = perm_matrix_rep(C2, "1.1")
    with pytest.raises(ValueError):
        reg_const_matrix({}, rep, [[0, 1], [2, 0]], -1)
    with pytest.raises(DegeneratePairingError):
        reg_const_matrix({}, rep, [[0, 0], [0, 0]], -1)
    with pytest.raises(ValueError):
        reg_const_matrix({}, rep, [[1, 0], [0, 2]], -1)  # not invariant
    with pytest.raises(ValueError):
        reg_const_matrix({}, rep, [[1]], -1)


def test_matrix_fixed_det_c2_regular():
    C2 = cyclic_group(2)
    rep = perm_matrix_rep(C2, "1.1")
    ident = identity_matrix(2)
    assert matrix_fixed_det(rep, ident, "2.1") == 1
    assert matrix_fixed_det(rep, ident, "1.1") == 1
    v = reg_const_matrix({"1.1": 2, "2.1": -2}, rep, ident, -1)
    assert v.raw == 1


def test_reg_const_matrix_quaternion():
    Q8 = quaternion_group()
    rep = MatrixRep(Q8, [QUAT_I, QUAT_J])
    theta = {"1.1": 1, "2.1": -1}
    v_auto = reg_const_matrix(theta, rep, "auto", -1)
    v_id = reg_const_matrix(theta, rep, identity_matrix(4), -1)
    # the model carries the symplectic character twice, so the value is a
    # square no matter which pairing is used
    assert v_id.raw == 1
    assert v_auto.is_norm() and v_auto.same_mod_norms(v_id)
    assert reg_const_matrix(theta, rep, "auto", -1).raw == v_auto.raw
    assert reg_const_matrix({}, rep, "auto", -1).raw == 1


def test_pairing_choice_is_invisible_mod_norms():
    G = dihedral_group(21)
    rep = perm_matrix_rep(G, "6.1")
    values = [
        reg_const_matrix(D21_THETA, rep, identity_matrix(7), 21),
        reg_const_matrix(D21_THETA, rep, "auto", 21, seed=0),
        reg_const_matrix(D21_THETA, rep, "auto", 21, seed=5),
    ]
    for v in values[1:]:
        assert values[0].same_mod_norms(v)
    perm = reg_const_perm(G, D21_THETA, {"6.1": 1}, 21)
    assert values[0].same_mod_norms(perm)


@pytest.mark.parametrize("maker,d,cids", [
    (lambda: dihedral_group(21), 21, ["6.1", "14.1", "42.1"]),
    (quaternion_group, -1, ["2.1", "4.1", "8.1"]),
])
def test_matrix_and_perm_routes_agree(maker, d, cids):
    G = maker()
    lat = k_relation_basis(G, d)
    theta = lat.basis[0]
    for cid in cids:
        vm = reg_const_matrix(theta, perm_matrix_rep(G, cid), "auto", d)
        vp = reg_const_perm(G, theta, {cid: 1}, d)
        assert vm.same_mod_norms(vp)


def test_virtual_matrix_route_d21():
    # sigma_7 = Q[G/S_3] - Q[G/G], evaluated one permutation model at a time
    G = dihedral_group(21)
    num = reg_const_matrix(D21_THETA, perm_matrix_rep(G, "6.1"), "auto", 21)
    den = reg_const_matrix(D21_THETA, perm_matrix_rep(G, "42.1"), "auto", 21)
    assert is_norm_from_quadratic(num.raw / den.raw / 27, 21)


# ---------------------------------------------------------------------------
# structural invariants


def test_multiplicative_in_theta_and_tau():
    G = dihedral_group(21)
    lat = k_relation_basis(G, 21)
    rng = random.Random(11)
    thetas = random_lattice_elements(lat, rng, count=3)
    tau1 = PermVirtualRep({"6.1": 1, "42.1": -1})
    tau2 = PermVirtualRep({"14.1": 2})
    for theta in thetas:
        a = reg_const_perm(G, theta, tau1, 21)
        b = reg_const_perm(G, theta, tau2, 21)
        both = PermVirtualRep(burnside_add(tau1.coeffs, tau2.coeffs))
        assert reg_const_perm(G, theta, both, 21).raw == a.raw * b.raw
    t1, t2 = thetas[0], thetas[1]
    s = burnside_add(t1, t2)
    assert reg_const_perm(G, s, tau1, 21).raw == \
        reg_const_perm(G, t1, tau1, 21).raw * reg_const_perm(G, t2, tau1, 21).raw

    rep = perm_matrix_rep(G, "6.1")
    q = invariant_pairing(rep, seed=1)
    assert reg_const_matrix(s, rep, q, 21).raw == \
        reg_const_matrix(t1, rep, q, 21).raw * reg_const_matrix(t2, rep, q, 21).raw


@pytest.mark.parametrize("maker,d", [
    (lambda: dihedral_group(21), 21),
    (quaternion_group, -1),
    (alternating4_group, -3),
])
def test_cyclic_perm_modules_are_norms(maker, d):
    G = maker()
    lat = k_relation_basis(G, d)
    cyclic = [c.id for c in G.subgroup_classes() if is_cyclic_class(G, c)]
    assert cyclic
    for theta in lat.basis:
        for cid in cyclic:
            assert reg_const_perm(G, theta, {cid: 1}, d).is_norm()


def test_cyclic_group_everything_is_a_norm():
    C12 = cyclic_group(12)
    lat = k_relation_basis(C12, -3)
    for t in rational_irreducibles(C12):
        for theta in lat.basis:
            assert reg_const_rational_irr(C12, theta, t, -3).is_norm()


@pytest.mark.parametrize("d", [-7, 21])
def test_odd_order_everything_is_a_norm(d):
    F21 = metacyclic_group(7, 3, 2)
    lat = k_relation_basis(F21, d)
    for theta in lat.basis:
        for t in rational_irreducibles(F21):
            assert reg_const_rational_irr(F21, theta, t, d).is_norm()
        for c in F21.subgroup_classes():
            assert reg_const_perm(F21, theta, {c.id: 1}, d).is_norm()


@pytest.mark.parametrize("maker,d,hid,theta", [
    (lambda: dihedral_group(21), 21, "6.1", D21_THETA),
    (quaternion_group, -1, "4.1", {"1.1": 1, "2.1": -1}),
    (alternating4_group, -3, "4.1", None),
])
def test_induction_restriction_compatibility(maker, d, hid, theta):
    G = maker()
    if theta is None:
        theta = k_relation_basis(G, d).basis[0]
    hsub = subgroup_rep(G, hid)
    H, to_sub = subgroup_as_group(G, hsub)
    back = {v: k for k, v in to_sub.items()}
    res = push_to_standalone(G, hsub, H, to_sub, burnside_res(G, theta, hsub))
    for c in H.subgroup_classes():
        u_in_g = frozenset(back[x] for x in c.representative)
        lhs = reg_const_perm(G, theta, {G.classify_subgroup(u_in_g).id: 1}, d)
        rhs = reg_const_perm(H, res, {c.id: 1}, d)
        assert lhs.same_mod_norms(rhs)


def test_fixed_det_against_coset_counting():
    # H -> perm_fixed_det(G, H, D) differs from the index-times-residue
    # local count by the constant |D| on every double coset, so the ratio
    # is trivial on K-relations whenever D has a cyclic quotient
    G = dihedral_group(21)
    dsub = subgroup_rep(G, "6.1")
    isub = subgroup_rep(G, "3.1")
    fn = LocalFn(G, dsub, isub, EF())
    const = LocalFn(G, dsub, isub, Const(6))

    def ratio(hrep):
        return eval_localfn(fn, hrep) / perm_fixed_det(G, hrep, dsub)

    for c in G.subgroup_classes():
        assert ratio(c.representative) == eval_localfn(const, c.id)
    report = is_trivial_on_k_relations(ratio, G, 21)
    assert report.trivial
    theta_value = eval_on_theta(ratio, G, D21_THETA)
    assert is_norm_from_quadratic(theta_value, 21)
