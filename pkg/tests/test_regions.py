import numpy as np
import pytest

from bcbounds.channel import Channel, make_product
from bcbounds.counterexample import component
from bcbounds.kernel import entropy, mutual_information
from bcbounds.marton import AuxiliaryJoint, Cardinalities
from bcbounds.regions import (
    REGION_KINDS,
    ProductAuxiliary,
    RateRegionPolytope,
    UvAuxiliary,
    _region_rows,
    build_region,
    default_region_profiles,
    evaluate_uv_point,
    region_support,
    uv_sum_rate,
)
from bcbounds.search import SearchConfig

CFG = SearchConfig(restarts=6, max_iters=120, seed=0)


def h2(p):
    return -p * np.log2(p) - (1 - p) * np.log2(1 - p)


def bsc_pair(py, pz):
    my = np.array([[1 - py, py], [py, 1 - py]])
    mz = np.array([[1 - pz, pz], [pz, 1 - pz]])
    return Channel(np.einsum("xy,xz->xyz", my, mz))


def random_channel(rng, nx, ny, nz):
    return Channel(rng.dirichlet(np.ones(ny * nz), size=nx).reshape(nx, ny, nz))


def test_uv_auxiliary_validation():
    with pytest.raises(ValueError):
        UvAuxiliary(np.full((2, 2), 0.25))  # wrong rank
    with pytest.raises(ValueError):
        UvAuxiliary(np.full((2, 2, 2), 0.25))  # sums to 2


def test_uv_point_matches_kernel():
    rng = np.random.default_rng(0)
    c = random_channel(rng, 3, 2, 2)
    t = rng.dirichlet(np.ones(2 * 3 * 3)).reshape(2, 3, 3)
    point = evaluate_uv_point(c, UvAuxiliary(t))
    p = np.einsum("uvx,xyz->uvxyz", t, c.q)
    u, v, x, y, z = range(5)
    assert point.r1_bound == pytest.approx(mutual_information(p, (u,), (y,)), abs=1e-11)
    assert point.r2_bound == pytest.approx(mutual_information(p, (v,), (z,)), abs=1e-11)
    assert point.sum_y_side == pytest.approx(
        mutual_information(p, (u,), (y,)) + mutual_information(p, (x,), (z,), given=(u,)),
        abs=1e-11,
    )
    assert point.sum_z_side == pytest.approx(
        mutual_information(p, (v,), (z,)) + mutual_information(p, (x,), (y,), given=(v,)),
        abs=1e-11,
    )
    assert point.sum_rate == min(
        point.r1_bound + point.r2_bound, point.sum_y_side, point.sum_z_side
    )


def test_uv_point_constant_auxiliaries():
    rng = np.random.default_rng(1)
    c = random_channel(rng, 3, 2, 2)
    px = rng.dirichlet(np.ones(3))
    t = px.reshape(1, 1, 3)
    point = evaluate_uv_point(c, UvAuxiliary(t))
    joint = np.einsum("x,xyz->xyz", px, c.q)
    assert point.r1_bound == pytest.approx(0.0, abs=1e-12)
    assert point.r2_bound == pytest.approx(0.0, abs=1e-12)
    assert point.sum_y_side == pytest.approx(mutual_information(joint, (0,), (2,)), abs=1e-11)
    assert point.sum_z_side == pytest.approx(mutual_information(joint, (0,), (1,)), abs=1e-11)


def test_uv_sum_rate_on_dominated_pair_equals_capacity():
    # Y less noisy than Z: all three branches cap at max I(X;Y), met at U=X
    c = bsc_pair(0.1, 0.3)
    res = uv_sum_rate(c, CFG)
    assert res.converged
    assert res.value == pytest.approx(1 - h2(0.1), abs=2e-3)


def test_uv_sum_rate_beats_seed(tmp_path):
    rng = np.random.default_rng(2)
    c = random_channel(rng, 3, 3, 3)
    seed = UvAuxiliary(rng.dirichlet(np.ones(2 * 2 * 3)).reshape(2, 2, 3))
    at_seed = evaluate_uv_point(c, seed).sum_rate
    res = uv_sum_rate(c, CFG, extra_seeds=[seed])
    assert res.value >= at_seed - 1e-9


# ------------------------------------------------- product region oracles


def _lift(c, aux):
    return np.einsum("uvwx,xyz->uvwxyz", aux.joint, c.q)


def _term_oracle(c, aux):
    p = _lift(c, aux)
    u, v, w, x, y, z = range(6)
    mi = lambda a, b, g=(): mutual_information(p, a, b, given=g)
    uy = mi((u,), (y,), (w,))
    vz = mi((v,), (z,), (w,))
    return {
        "ay": mi((w,), (y,)),
        "az": mi((w,), (z,)),
        "uy": uy,
        "vz": vz,
        "su": uy + mi((x,), (z,), (u, w)),
        "sv": vz + mi((x,), (y,), (v, w)),
        "hyw": entropy(p, axes=(y,), given=(w,)),
        "hzw": entropy(p, axes=(z,), given=(w,)),
        "svh": vz + entropy(p, axes=(y,), given=(v, w)),
        "suh": uy + entropy(p, axes=(z,), given=(u, w)),
        "xy": mi((x,), (y,), (w,)),
        "xz": mi((x,), (z,), (w,)),
        "niuv": -mi((u,), (v,), (w,)),
    }


def _random_product_aux(rng, pc, kind):
    p1, p2 = default_region_profiles(pc, kind)
    a1 = rng.dirichlet(np.ones(p1.nu * p1.nv * p1.nw * pc.c1.nx)).reshape(
        p1.nu, p1.nv, p1.nw, pc.c1.nx
    )
    a2 = rng.dirichlet(np.ones(p2.nu * p2.nv * p2.nw * pc.c2.nx)).reshape(
        p2.nu, p2.nv, p2.nw, pc.c2.nx
    )
    return ProductAuxiliary(AuxiliaryJoint(a1), AuxiliaryJoint(a2))


def test_build_region_rows_match_kernel_oracle():
    rng = np.random.default_rng(3)
    pc = make_product(random_channel(rng, 2, 2, 2), random_channel(rng, 2, 2, 2))
    for kind in REGION_KINDS:
        for mirrored in ((False, True) if kind == "product_outer" else (False,)):
            aux = _random_product_aux(rng, pc, kind)
            region = build_region(pc, aux, kind, mirrored=mirrored)
            rows = _region_rows(kind, mirrored)
            assert len(rows) == len(region.inequalities)
            o1 = _term_oracle(pc.c1, aux.a1)
            o2 = _term_oracle(pc.c2, aux.a2)
            for (a, t1, t2), (a_got, rhs) in zip(rows, region.inequalities):
                assert a == a_got
                expect = sum(o1[n] for n in t1) + sum(o2[n] for n in t2)
                assert rhs == pytest.approx(expect, abs=1e-10), (kind, t1, t2)


def test_unknown_region_kind_rejected():
    rng = np.random.default_rng(4)
    pc = make_product(random_channel(rng, 2, 2, 2), random_channel(rng, 2, 2, 2))
    aux = _random_product_aux(rng, pc, "product_outer")
    with pytest.raises(ValueError):
        build_region(pc, aux, "nonsense")


def test_outer_sum_rows_match_semi_deterministic_on_deterministic_product():
    # with Y1 and Z2 deterministic, I(X;Y|V,W) = H(Y|V,W) per component, so
    # the outer bound's mixed sum row coincides with the specialized form
    rng = np.random.default_rng(5)
    pc = make_product(component("y"), component("z"))
    p1, p2 = default_region_profiles(pc, "semi_deterministic")
    a1 = rng.dirichlet(np.ones(p1.nu * p1.nv * p1.nw * 4)).reshape(p1.nu, p1.nv, p1.nw, 4)
    a2 = rng.dirichlet(np.ones(p2.nu * p2.nv * p2.nw * 4)).reshape(p2.nu, p2.nv, p2.nw, 4)
    aux = ProductAuxiliary(AuxiliaryJoint(a1), AuxiliaryJoint(a2))
    outer = build_region(pc, aux, "product_outer")
    semi = build_region(pc, aux, "semi_deterministic")
    outer_rows = _region_rows("product_outer", False)
    semi_rows = _region_rows("semi_deterministic", False)

    def sum_rhs(region, rows, want):
        out = {}
        for (a, t1, t2), (_, rhs) in zip(rows, region.inequalities):
            if a == (1, 1, 1) and (t1[1:], t2[1:]) == want:
                out[(t1[0], t2[0])] = rhs
        return out

    got_outer = sum_rhs(outer, outer_rows, (("sv",), ("su",)))
    got_semi = sum_rhs(semi, semi_rows, (("svh",), ("suh",)))
    assert set(got_outer) == set(got_semi) == {("ay", "ay"), ("az", "az")}
    for key in got_outer:
        assert got_outer[key] == pytest.approx(got_semi[key], abs=1e-10)


def test_polytope_geometry():
    region = RateRegionPolytope(
        inequalities=[
            ((1, 0, 0), 1.0),
            ((0, 1, 0), 2.0),
            ((0, 0, 1), 3.0),
            ((1, 1, 1), 4.0),
        ],
        tag="toy",
    )
    verts = region.vertices()
    assert np.allclose(verts.min(axis=0), 0.0)
    value, vertex = region.support((0.0, 1.0, 1.0), fix_r0=0.0)
    assert value == pytest.approx(4.0, abs=1e-9)
    assert vertex[0] == pytest.approx(0.0, abs=1e-9)
    assert vertex[1] + vertex[2] == pytest.approx(4.0, abs=1e-9)
    assert region.contains((0.0, 2.0, 2.0))
    assert region.contains((1.0, 1.0, 2.0))
    assert not region.contains((1.0, 2.0, 3.0))
    assert not region.contains((-0.1, 0.0, 0.0))
    # export shape
    as_json = region.to_json_list()
    assert as_json[0] == {"a": [1.0, 0.0, 0.0], "rhs": 1.0}


def test_region_support_reaches_seeded_value():
    rng = np.random.default_rng(6)
    pc = make_product(random_channel(rng, 2, 2, 2), random_channel(rng, 2, 2, 2))
    aux = _random_product_aux(rng, pc, "product_outer")
    at_aux, _ = build_region(pc, aux, "product_outer").support((0, 1, 1), fix_r0=0.0)
    res = region_support(
        pc, "product_outer", (0, 1, 1), CFG, extra_seeds=[aux], fix_r0=0.0
    )
    assert res.value >= at_aux - 1e-9
    assert res.vertex[0] == pytest.approx(0.0, abs=1e-9)
    assert res.region.tag == "product_outer"


def test_region_support_extra_seed_profile_fitting():
    # seeds with full profiles must adapt to the collapsed specialized ones
    rng = np.random.default_rng(7)
    pc = make_product(random_channel(rng, 2, 2, 2), random_channel(rng, 2, 2, 2))
    full = _random_product_aux(rng, pc, "product_outer")
    res = region_support(
        pc, "semi_deterministic", (0, 1, 1), CFG, extra_seeds=[full], fix_r0=0.0
    )
    assert np.isfinite(res.value)


def test_mirror_symmetry_on_symmetric_product():
    # second component is the receiver-swapped copy of the first, so the
    # mirrored row assignment must give the same support in (0, 1, 1)
    pc = make_product(component("y"), component("z"))
    cfg = SearchConfig(restarts=4, max_iters=120, seed=0)
    plain = region_support(pc, "product_outer", (0, 1, 1), cfg, fix_r0=0.0)
    mirror = region_support(
        pc, "product_outer", (0, 1, 1), cfg, mirrored=True, fix_r0=0.0
    )
    assert mirror.region.tag == "product_outer_mirror"
    assert plain.value == pytest.approx(mirror.value, abs=2e-3)
    assert plain.value == pytest.approx(8 / 3, abs=1e-6)


def test_class_notes():
    rng = np.random.default_rng(8)
    matched = make_product(component("y"), component("z"))
    aux = _random_product_aux(rng, matched, "semi_deterministic")
    assert build_region(matched, aux, "semi_deterministic").notes == []
    mismatched = make_product(random_channel(rng, 2, 2, 2), random_channel(rng, 2, 2, 2))
    aux2 = _random_product_aux(rng, mismatched, "semi_deterministic")
    notes = build_region(mismatched, aux2, "semi_deterministic").notes
    assert notes and "deterministic" in notes[0]


def test_default_region_profiles_collapse():
    pc = make_product(component("y"), component("z"))
    p1, p2 = default_region_profiles(pc, "semi_deterministic")
    assert p1.nu == 1 and p2.nv == 1
    p1, p2 = default_region_profiles(pc, "more_capable")
    assert p1.nv == 1 and p2.nu == 1
    p1, p2 = default_region_profiles(pc, "product_outer")
    assert (p1.nu, p1.nv, p1.nw) == (4, 4, 8)
