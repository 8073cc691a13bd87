import math
import random
from fractions import Fraction

import pytest
from sympy import cyclotomic_poly, divisors

from krel.characters import (
    character_table,
    galois_orbit,
    inner_product,
    perm_character,
    rational_irreducibles,
)
from krel.exactmath import CycNumber, is_norm_from_quadratic, snf_solve
from krel.groups import (
    alternating4_group,
    burnside_ind,
    burnside_res,
    burnside_project,
    cyclic_group,
    dihedral_group,
    group_from_cycles,
    quaternion_group,
    subgroup_as_group,
)
from krel.relations import (
    BRAUER,
    CondDivides,
    Const,
    E,
    EF,
    F,
    LocalFn,
    Product,
    brauer_basis,
    coset_profile,
    eval_localfn,
    eval_on_theta,
    find_norm_relation,
    format_theta,
    is_brauer_relation,
    is_k_relation,
    is_trivial_on_k_relations,
    k_relation_basis,
    psi_d,
    theta_pairs,
)

SAMPLE = {}


def sample(name):
    if not SAMPLE:
        SAMPLE.update({
            "S3": group_from_cycles(3, ["(1 2)", "(1 2 3)"], name="S3"),
            "C4": cyclic_group(4),
            "C5": cyclic_group(5),
            "C6": cyclic_group(6),
            "C12": cyclic_group(12),
            "Q8": quaternion_group(),
            "A4": alternating4_group(),
            "D21": dihedral_group(21),
        })
    return SAMPLE[name]


S3_RELATION = {"1.1": 1, "2.1": -2, "3.1": -1, "6.1": 2}
D21_THETA = {"2.1": 1, "6.1": -1, "14.1": -1, "42.1": 1}

ONE = CycNumber.from_rational(1)


def value_order(v, cap=64):
    acc = v
    for t in range(1, cap + 1):
        if acc == ONE:
            return t
        acc = acc * v
    raise AssertionError("no finite order found")


def linear_char_of_order(G, n):
    gcls = next(i for i, cls in enumerate(G.conjugacy_classes())
                if G.element_order(cls[0]) == G.exponent())
    for chi in character_table(G).irreducibles:
        if chi.degree() == 1 and value_order(chi.values[gcls]) == n:
            return chi
    raise AssertionError(f"no linear character of order {n}")


def theta_perm_character(G, theta):
    total = None
    for cid, coeff in theta.items():
        pc = coeff * perm_character(G, G.subgroup_class_by_id(cid).representative)
        total = pc if total is None else total + pc
    return total


# ---------------------------------------------------------------------------
# psi_d


def test_psi_d_examples():
    assert psi_d(6, 6) == {"1.1": 1, "2.1": -1, "3.1": -1, "6.1": 1}
    assert psi_d(5, 1) == {"5.1": 1}
    assert psi_d(12, 1) == {"12.1": 1}
    for p in (2, 3, 7):
        assert psi_d(p, p) == {"1.1": 1, f"{p}.1": -1}
    with pytest.raises(ValueError):
        psi_d(6, 4)


@pytest.mark.parametrize("n", [6, 12])
def test_psi_d_picks_out_characters_of_order_d(n):
    G = sample(f"C{n}")
    gcls = next(i for i, cls in enumerate(G.conjugacy_classes())
                if G.element_order(cls[0]) == n)
    table = character_table(G)
    for d in divisors(n):
        pc = theta_perm_character(G, psi_d(n, d))
        for chi in table.irreducibles:
            expected = 1 if value_order(chi.values[gcls]) == d else 0
            assert inner_product(pc, chi) == expected


# ---------------------------------------------------------------------------
# Brauer relations


def test_s3_brauer_relation():
    S3 = sample("S3")
    assert is_brauer_relation(S3, S3_RELATION)
    assert is_brauer_relation(S3, {k: 3 * v for k, v in S3_RELATION.items()})
    assert not is_brauer_relation(S3, {"1.1": 1, "2.1": -2, "3.1": -1, "6.1": 1})
    assert is_brauer_relation(S3, {})


def test_cyclic_groups_have_no_brauer_relations():
    rng = random.Random(20260816)
    for name in ("C4", "C6", "C12"):
        G = sample(name)
        ids = [c.id for c in G.subgroup_classes()]
        for _ in range(8):
            theta = {cid: rng.randint(-3, 3) for cid in ids}
            if any(theta.values()):
                assert not is_brauer_relation(G, theta)
        assert brauer_basis(G).rank == 0


def test_brauer_basis_rank_counts_non_cyclic_classes():
    for name, rank in [("C5", 0), ("S3", 1), ("Q8", 1), ("A4", 2), ("D21", 3)]:
        G = sample(name)
        lat = brauer_basis(G)
        assert lat.rank == rank
        assert lat.rank == sum(1 for c in G.subgroup_classes() if not c.is_cyclic)
        for b in lat.basis:
            assert is_brauer_relation(G, b)
            assert theta_perm_character(G, b) == 0 * perm_character(
                G, frozenset({0}))


def test_s3_relation_spans_the_brauer_lattice():
    S3 = sample("S3")
    lat = brauer_basis(S3)
    assert lat.contains(S3_RELATION)
    assert not lat.contains({"1.1": 1})
    # membership cross-check through an integer linear solve
    cols = [[b.get(c.id, 0) for b in lat.basis] for c in S3.subgroup_classes()]
    target = [S3_RELATION.get(c.id, 0) for c in S3.subgroup_classes()]
    assert snf_solve(cols, target).minimal_m == 1


def test_k_relation_basis_accepts_brauer_marker():
    Q8 = sample("Q8")
    assert k_relation_basis(Q8, BRAUER).rank == brauer_basis(Q8).rank


# ---------------------------------------------------------------------------
# K-relations


def test_c4_example_reduces_to_multiplicity_parity():
    C4 = sample("C4")
    theta = {"1.1": 1, "2.1": -1}
    # independent route: the virtual character is chi + chi^3 for chi of
    # order 4, so multiplicities are 0 on the rational characters and 1 on
    # the pair generating Q(i)
    pc = theta_perm_character(C4, theta)
    chi4 = linear_char_of_order(C4, 4)
    mults = [inner_product(pc, chi) for chi in character_table(C4).irreducibles]
    assert sorted(mults) == [0, 0, 1, 1]
    assert inner_product(pc, chi4) == 1
    assert is_k_relation(C4, theta, -1)
    assert not is_k_relation(C4, theta, -3)
    assert not is_k_relation(C4, theta, 5)


def test_d21_main_example_is_a_21_relation():
    D21 = sample("D21")
    assert is_k_relation(D21, D21_THETA, 21)
    assert not is_k_relation(D21, D21_THETA, 5)
    assert not is_k_relation(D21, D21_THETA, -21)


def test_brauer_relations_are_k_relations_for_every_field():
    S3 = sample("S3")
    for d in (-1, 2, -3, 5, 21):
        assert is_k_relation(S3, S3_RELATION, d)
    assert is_k_relation(S3, S3_RELATION, BRAUER)


def test_q8_c1_minus_center_works_for_all_quadratic_fields():
    Q8 = sample("Q8")
    theta = {"1.1": 1, "2.1": -1}
    for d in (-1, 2, -2, 3, -3, 5, -7, 21):
        assert is_k_relation(Q8, theta, d)
    assert not is_brauer_relation(Q8, theta)


def test_is_k_relation_validates_the_discriminant():
    C4 = sample("C4")
    with pytest.raises(ValueError):
        is_k_relation(C4, {"1.1": 2}, 1)
    with pytest.raises(ValueError):
        is_k_relation(C4, {"1.1": 2}, 12)


def lattice_membership_by_solver(G, lat, theta):
    cols = [[b.get(c.id, 0) for b in lat.basis] for c in G.subgroup_classes()]
    target = [theta.get(c.id, 0) for c in G.subgroup_classes()]
    try:
        return snf_solve(cols, target).minimal_m == 1
    except Exception:
        return False


@pytest.mark.parametrize("name,d", [
    ("C4", -1), ("C6", -3), ("Q8", -1), ("D21", 21), ("A4", -3),
])
def test_k_relation_lattice_has_full_rank(name, d):
    G = sample(name)
    lat = k_relation_basis(G, d)
    assert lat.rank == len(G.subgroup_classes())
    for b in lat.basis:
        assert is_k_relation(G, b, d)
    for c in G.subgroup_classes():
        doubled = {c.id: 2}
        assert lat.contains(doubled)
        assert lattice_membership_by_solver(G, lat, doubled)


def test_c4_lattice_contains_the_expected_elements():
    C4 = sample("C4")
    lat = k_relation_basis(C4, -1)
    theta = {"1.1": 1, "2.1": -1}
    assert lat.contains(theta)
    assert lattice_membership_by_solver(C4, lat, theta)
    assert not lat.contains({"1.1": 1})
    assert not lat.contains({"1.1": 1, "2.1": -1, "4.1": 1})


def test_d21_lattice_contains_the_main_theta():
    D21 = sample("D21")
    lat = k_relation_basis(D21, 21)
    assert lat.contains(D21_THETA)
    assert lattice_membership_by_solver(D21, lat, D21_THETA)


# ---------------------------------------------------------------------------
# Norm relations


def orbit_sum(chi):
    total = None
    for member in galois_orbit(chi):
        total = member if total is None else total + member
    return total


def check_norm_relation(G, chi, m, theta):
    lhs = theta_perm_character(G, theta)
    rhs = m * orbit_sum(chi)
    assert lhs == rhs


def test_find_norm_relation_on_c6():
    C6 = sample("C6")
    chi6 = linear_char_of_order(C6, 6)
    m, theta = find_norm_relation(C6, chi6)
    assert (m, theta) == (1, psi_d(6, 6))
    check_norm_relation(C6, chi6, m, theta)


def test_find_norm_relation_on_d21():
    D21 = sample("D21")
    taus = rational_irreducibles(D21)
    tau = taus[4]
    assert tau.label == "tau_5"
    assert len(tau.orbit_indices) == 6
    assert tau.constituent.degree() == 2
    m, theta = find_norm_relation(D21, tau.constituent)
    assert (m, theta) == (1, D21_THETA)
    check_norm_relation(D21, tau.constituent, m, theta)


def test_find_norm_relation_on_q8_needs_multiplier_two():
    Q8 = sample("Q8")
    chi = next(c for c in character_table(Q8).irreducibles if c.degree() == 2)
    m, theta = find_norm_relation(Q8, chi)
    assert (m, theta) == (2, {"1.1": 1, "2.1": -1})
    check_norm_relation(Q8, chi, m, theta)
    # the multiplier is genuinely minimal: every multiplicity of chi in a
    # transitive permutation module is even, while the target is odd
    for cls in Q8.subgroup_classes():
        pc = perm_character(Q8, cls.representative)
        assert inner_product(pc, chi) % 2 == 0


def test_find_norm_relation_on_trivial_character():
    for name in ("S3", "C6"):
        G = sample(name)
        triv = character_table(G).irreducibles[0]
        assert triv.degree() == 1 and triv.is_rational()
        m, theta = find_norm_relation(G, triv)
        assert m == 1
        assert theta == {f"{G.order}.1": 1}


def test_find_norm_relation_rejects_non_irreducibles():
    C6 = sample("C6")
    doubled = character_table(C6).irreducibles[0] * 2
    with pytest.raises(ValueError):
        find_norm_relation(C6, doubled)


# ---------------------------------------------------------------------------
# Local functions


def whole(G):
    return frozenset(range(G.order))


def test_localfn_validation():
    S3 = sample("S3")
    c2 = S3.subgroup_class_by_id("2.1").representative
    c3 = S3.subgroup_class_by_id("3.1").representative
    with pytest.raises(ValueError):
        LocalFn(S3, whole(S3), c2, EF())  # not normal
    Q8 = sample("Q8")
    with pytest.raises(ValueError):
        LocalFn(Q8, whole(Q8), frozenset({0}), EF())  # quotient not cyclic
    with pytest.raises(ValueError):
        LocalFn(S3, c3, c2, EF())  # I outside D
    with pytest.raises(ValueError):
        Const(0)
    with pytest.raises(ValueError):
        CondDivides(0, 2, 1)
    LocalFn(Q8, whole(Q8), Q8.subgroup_class_by_id("4.1").representative, E())


def test_eval_ef_at_trivial_subgroup_gives_group_order():
    S3 = sample("S3")
    c3 = S3.subgroup_class_by_id("3.1").representative
    fn = LocalFn(S3, whole(S3), c3, EF())
    assert eval_localfn(fn, frozenset({0})) == 6
    C6 = sample("C6")
    fn6 = LocalFn(C6, whole(C6), frozenset({0}), EF())
    assert eval_localfn(fn6, "1.1") == 6


def test_eval_constant_on_psi_d_is_one():
    C6 = sample("C6")
    fn = LocalFn(C6, whole(C6), frozenset({0}), Const(Fraction(7, 3)))
    for d in (2, 3, 6):
        assert eval_on_theta(fn, C6, psi_d(6, d)) == 1
    assert eval_on_theta(fn, C6, psi_d(6, 1)) == Fraction(7, 3)


@pytest.mark.parametrize("n,ds", [(6, (2, 3, 6)), (4, (2, 4)), (12, (2, 3, 4, 6, 12))])
def test_index_function_on_psi_d_gives_cyclotomic_value(n, ds):
    G = cyclic_group(n)
    fn = LocalFn(G, whole(G), whole(G), E())
    for d in ds:
        assert eval_on_theta(fn, G, psi_d(n, d)) == cyclotomic_poly(d, 1)


def test_coset_profile_internal_consistency():
    for name, did, iid in [("S3", "6.1", "3.1"), ("Q8", "4.1", "2.1"),
                           ("D21", "14.1", "7.1"), ("A4", "4.1", "2.1"),
                           ("D21", "21.1", "7.1")]:
        G = sample(name)
        dsub = G.subgroup_class_by_id(did).representative
        isub = G.subgroup_class_by_id(iid).representative
        for cls in G.subgroup_classes():
            for e, f in coset_profile(G, dsub, isub, cls.representative):
                assert len(isub) % e == 0
                assert (len(dsub) // len(isub)) % f == 0


def test_pow_nodes_and_products():
    C6 = sample("C6")
    fn = LocalFn(C6, whole(C6), whole(C6),
                 Product((E(), Const(Fraction(1, 2)), F())))
    # one double coset, e = [G:H], f = 1
    assert eval_localfn(fn, "2.1") == Fraction(3, 2)
    from krel.relations import PowFloor, PowHalf
    half = LocalFn(C6, whole(C6), whole(C6), PowHalf(Fraction(5)))
    assert eval_localfn(half, "1.1") == 5 ** 3  # floor(6 / 2) * 1
    assert eval_localfn(half, "6.1") == 1
    flo = LocalFn(C6, whole(C6), whole(C6), PowFloor(Fraction(2), 6))
    assert eval_localfn(flo, "1.1") == 2 ** 3  # floor(6 * 6 / 12) * 1
    assert eval_localfn(flo, "3.1") == 2  # e = 2, floor(12 / 12) = 1


def test_descent_to_smaller_inertia_for_product_functions():
    cases = [
        ("C12", "12.1", "6.1", ("1.1", "2.1", "3.1")),
        ("C6", "6.1", "3.1", ("1.1",)),
        ("D21", "21.1", "7.1", ("1.1",)),
    ]
    for name, did, iid, smaller in cases:
        G = sample(name)
        dsub = G.subgroup_class_by_id(did).representative
        isub = G.subgroup_class_by_id(iid).representative
        for psi in (EF(), Const(Fraction(3)), Product((EF(), Const(Fraction(2))))):
            fn = LocalFn(G, dsub, isub, psi)
            for iid0 in smaller:
                isub0 = G.subgroup_class_by_id(iid0).representative
                assert isub0 < isub
                fn0 = LocalFn(G, dsub, isub0, psi)
                for cls in G.subgroup_classes():
                    assert eval_localfn(fn, cls) == eval_localfn(fn0, cls)


# ---------------------------------------------------------------------------
# Triviality on K-relations


def test_index_function_is_trivial_on_cyclic_groups():
    for n in (4, 6, 12):
        G = cyclic_group(n)
        fn = LocalFn(G, whole(G), whole(G), E())
        for d in (-1, -3, 5, 21, -7):
            assert is_trivial_on_k_relations(fn, G, d)


def test_constants_are_trivial():
    for name in ("C6", "S3", "Q8"):
        G = sample(name)
        isub = (G.subgroup_class_by_id("4.1").representative
                if name == "Q8" else
                G.subgroup_class_by_id("3.1").representative
                if name == "S3" else frozenset({0}))
        fn = LocalFn(G, whole(G), isub, Const(Fraction(7)))
        for d in (-1, -3, 5):
            assert is_trivial_on_k_relations(fn, G, d)


def test_cond_divides_with_a_cyclotomic_norm_ratio_is_trivial():
    C6 = sample("C6")
    # 3 = N(1 - zeta_3) is a norm from Q(zeta_3)
    fn = LocalFn(C6, whole(C6), frozenset({0}), CondDivides(3, Fraction(3), Fraction(1)))
    for d in (-1, -3, 5, 21):
        assert is_trivial_on_k_relations(fn, C6, d)
    C12 = sample("C12")
    # 2 = N(1 + i) is a norm from Q(zeta_4)
    fn4 = LocalFn(C12, whole(C12), frozenset({0}), CondDivides(4, Fraction(2), Fraction(1)))
    for d in (-1, -3, 5):
        assert is_trivial_on_k_relations(fn4, C12, d)


def test_even_index_branch_is_trivial():
    # the value f when 2 | f and 1 otherwise, assembled from coset data
    for name, did, iid in [("C6", "6.1", "1.1"), ("C12", "12.1", "1.1"),
                           ("D21", "14.1", "7.1")]:
        G = sample(name)
        dsub = G.subgroup_class_by_id(did).representative
        isub = G.subgroup_class_by_id(iid).representative

        def branchy(rep, G=G, dsub=dsub, isub=isub):
            val = Fraction(1)
            for _, f in coset_profile(G, dsub, isub, rep):
                if f % 2 == 0:
                    val *= f
            return val

        for d in (-1, -3, 5, 21):
            assert is_trivial_on_k_relations(branchy, G, d)


def test_certificate_for_a_nontrivial_function():
    D21 = sample("D21")
    lat = k_relation_basis(D21, 21)

    def three_on_reflections(rep):
        cls = D21.classify_subgroup(frozenset(rep))
        return Fraction(3) if cls.id == "2.1" else Fraction(1)

    report = is_trivial_on_k_relations(three_on_reflections, D21, 21, lat)
    assert not report
    assert report.certificate is not None
    assert lat.contains(report.certificate)
    assert is_k_relation(D21, report.certificate, 21)
    assert not is_norm_from_quadratic(report.value, 21)
    # the motivating value: 3 on the main theta is not a norm from Q(sqrt 21)
    val = eval_on_theta(three_on_reflections, D21, D21_THETA)
    assert val == 3
    assert not is_norm_from_quadratic(val, 21)


def test_triviality_report_validates_inputs():
    C6 = sample("C6")
    fn = LocalFn(C6, whole(C6), whole(C6), E())
    lat = k_relation_basis(C6, -3)
    with pytest.raises(ValueError):
        is_trivial_on_k_relations(fn, C6, 5, lat)
    with pytest.raises(ValueError):
        is_trivial_on_k_relations(fn, C6, BRAUER)
    S3 = sample("S3")
    with pytest.raises(ValueError):
        eval_on_theta(fn, S3, {"1.1": 1})


# ---------------------------------------------------------------------------
# Closure of K-relations under restriction, induction, projection


def push_to_standalone(G, dsub, sub, to_sub, theta_sub_lattice):
    out = {}
    for cid, coeff in theta_sub_lattice.items():
        rep = next(c.representative for c in G.sub_lattice(dsub) if c.id == cid)
        image = frozenset(to_sub[h] for h in rep)
        key = sub.classify_subgroup(image).id
        out[key] = out.get(key, 0) + coeff
    return {k: v for k, v in out.items() if v}


def pull_from_standalone(G, dsub, sub, to_sub, theta_standalone):
    back = {v: k for k, v in to_sub.items()}
    out = {}
    for cid, coeff in theta_standalone.items():
        rep = sub.subgroup_class_by_id(cid).representative
        image = frozenset(back[h] for h in rep)
        key = G.classify_in_lattice(dsub, image).id
        out[key] = out.get(key, 0) + coeff
    return {k: v for k, v in out.items() if v}


def random_lattice_elements(lat, rng, count=4):
    out = []
    for _ in range(count):
        theta = {}
        for b in rng.sample(lat.basis, k=min(3, len(lat.basis))):
            c = rng.randint(-2, 2)
            for cid, v in b.items():
                theta[cid] = theta.get(cid, 0) + c * v
        out.append({k: v for k, v in theta.items() if v})
    return out


@pytest.mark.parametrize("name,d,did,nid", [
    ("D21", 21, "6.1", "21.1"),
    ("Q8", -1, "4.1", "2.1"),
    ("A4", -3, "4.1", "4.1"),
])
def test_k_relations_close_under_res_ind_proj(name, d, did, nid):
    G = sample(name)
    rng = random.Random(hash((name, d)) & 0xFFFF)
    lat = k_relation_basis(G, d)
    dsub = G.subgroup_class_by_id(did).representative
    sub, to_sub = subgroup_as_group(G, dsub)
    nsub = G.subgroup_class_by_id(nid).representative
    thetas = list(lat.basis) + random_lattice_elements(lat, rng)
    for theta in thetas:
        assert is_k_relation(G, theta, d)
        res = burnside_res(G, theta, dsub)
        assert is_k_relation(sub, push_to_standalone(G, dsub, sub, to_sub, res), d)
        _, proj = burnside_project(G, theta, nsub)
        q = G.quotient_group(nsub)
        assert is_k_relation(q, proj, d)
    # induction goes the other way: start from relations of the subgroup
    for theta_s in k_relation_basis(sub, d).basis:
        theta_lat = pull_from_standalone(G, dsub, sub, to_sub, theta_s)
        induced = burnside_ind(G, dsub, theta_lat)
        assert is_k_relation(G, induced, d)


# ---------------------------------------------------------------------------
# Reporting helpers


def test_theta_pairs_and_format():
    pairs = theta_pairs(D21_THETA)
    assert pairs == [("2.1", 1), ("42.1", 1), ("6.1", -1), ("14.1", -1)]
    assert format_theta(D21_THETA) == "[2.1] - [6.1] - [14.1] + [42.1]"
    assert format_theta({}) == "0"
    assert format_theta({"1.1": -2, "6.1": 1}) == "-2*[1.1] + [6.1]"
