import numpy as np
import pytest

from lpq2.core import LpVector
from lpq2.opnorm import (
    Operator2x2,
    adjoint,
    apply,
    is_contraction,
    norm_value,
    op_norm,
)
from lpq2.segment import pinned_operator

from oracles import (
    brute_force_norm,
    brute_force_second_maximizer,
    diag_norm_closed,
    mp_apply,
)


def random_operator(rng, p=None, q=None) -> Operator2x2:
    p = p if p is not None else float(rng.uniform(1.2, 6.0))
    q = q if q is not None else float(rng.uniform(1.2, 6.0))
    e = rng.normal(size=4)
    return Operator2x2(*(float(v) for v in e), p, q)


class TestApply:
    def test_identity(self):
        T = Operator2x2(1, 0, 0, 1, 3, 3)
        v = LpVector.unit(0.3, -0.9, 3)
        w = apply(T, v)
        assert w.coords() == v.coords()
        assert w.exponent.value == 3.0

    def test_pinned_maps_x_to_y(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            p = float(rng.uniform(1.2, 6.0))
            q = float(rng.uniform(1.2, 6.0))
            x = LpVector.unit(float(rng.normal()), float(rng.normal()), p)
            y = LpVector.unit(float(rng.normal()), float(rng.normal()), q)
            T = pinned_operator(x, y, float(rng.normal()))
            w = apply(T, x)
            assert abs(w.x1 - y.x1) <= 1e-12
            assert abs(w.x2 - y.x2) <= 1e-12

    def test_high_precision(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            T = random_operator(rng)
            v = LpVector(float(rng.normal()), float(rng.normal()), T.domain)
            w = apply(T, v)
            hp = mp_apply(T.entries(), v.coords())
            assert w.x1 == pytest.approx(hp[0], rel=1e-14, abs=1e-14)
            assert w.x2 == pytest.approx(hp[1], rel=1e-14, abs=1e-14)

    def test_exponent_mismatch(self):
        T = Operator2x2(1, 0, 0, 1, 3, 3)
        with pytest.raises(ValueError):
            apply(T, LpVector(1.0, 0.0, 2))


class TestOpNorm:
    def test_identity(self):
        cert = op_norm(Operator2x2(1, 0, 0, 1, 2, 2))
        assert cert.norm == pytest.approx(1.0, abs=1e-12)
        assert cert.independent_pair
        assert len(cert.maximizers) >= 2

    def test_rank_one_unique_maximizer(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            p = float(rng.uniform(1.3, 5.0))
            q = float(rng.uniform(1.3, 5.0))
            x = LpVector.from_mass(float(rng.uniform(0.55, 0.95)), p)
            y = LpVector.unit(float(rng.normal()), float(rng.normal()), q)
            T = pinned_operator(x, y, 0.0)
            cert = op_norm(T)
            assert cert.norm == pytest.approx(1.0, abs=1e-9)
            assert not cert.independent_pair
            m = cert.maximizers[0]
            align = min(
                max(abs(m.x1 - x.x1), abs(m.x2 - x.x2)),
                max(abs(m.x1 + x.x1), abs(m.x2 + x.x2)),
            )
            assert align <= 1e-5

    def test_diagonal_example(self):
        cert = op_norm(Operator2x2(1, 0, 0, 0.5, 3, 3))
        assert cert.norm == pytest.approx(1.0, abs=1e-12)
        assert len(cert.maximizers) == 1
        assert cert.maximizers[0].x1 == pytest.approx(1.0, abs=1e-9)
        bf, t_at, _ = brute_force_norm((1, 0, 0, 0.5), 3, 3, n=1_000_000)
        assert cert.norm == pytest.approx(bf, abs=1e-9)
        assert t_at == pytest.approx(1.0, abs=1e-5)

    def test_against_brute_force(self):
        rng = np.random.default_rng(3)
        for _ in range(15):
            T = random_operator(rng)
            got = norm_value(T)
            bf, _, _ = brute_force_norm(
                T.entries(), T.domain.value, T.codomain.value, n=200_000
            )
            assert got >= bf - 1e-9
            assert got == pytest.approx(bf, rel=1e-7)

    def test_diagonal_closed_form(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            p = float(rng.uniform(1.2, 6.0))
            q = float(rng.uniform(1.2, 6.0))
            d1, d2 = rng.uniform(0.2, 2.0, size=2)
            T = Operator2x2(float(d1), 0, 0, float(d2), p, q)
            want = diag_norm_closed(d1, d2, p, q)
            assert norm_value(T) == pytest.approx(want, rel=1e-11)

    def test_column_lower_bound_and_diag_equality(self):
        rng = np.random.default_rng(5)
        for _ in range(15):
            T = random_operator(rng)
            q = T.codomain
            c1 = apply(T, LpVector(1.0, 0.0, T.domain)).norm()
            c2 = apply(T, LpVector(0.0, 1.0, T.domain)).norm()
            assert norm_value(T) >= max(c1, c2) - 1e-9
        for _ in range(15):
            p = float(rng.uniform(1.2, 5.0))
            q = float(rng.uniform(p, 6.0))
            d1, d2 = rng.uniform(0.2, 2.0, size=2)
            T = Operator2x2(float(d1), 0, 0, float(d2), p, q)
            assert norm_value(T) == pytest.approx(max(d1, d2), abs=1e-9)

    def test_signed_permutation_invariance(self):
        rng = np.random.default_rng(6)
        perms = [
            ((1, 0), (0, 1)), ((-1, 0), (0, 1)), ((1, 0), (0, -1)),
            ((0, 1), (1, 0)), ((0, -1), (1, 0)),
        ]
        for _ in range(10):
            T = random_operator(rng)
            base = norm_value(T)
            for L in perms:
                for R in perms:
                    M = np.array(L) @ T.as_matrix() @ np.array(R)
                    S = Operator2x2(
                        float(M[0, 0]), float(M[0, 1]), float(M[1, 0]), float(M[1, 1]),
                        T.domain, T.codomain,
                    )
                    assert norm_value(S) == pytest.approx(base, abs=1e-11 * max(1, base))

    def test_homogeneity(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            T = random_operator(rng)
            c = float(rng.uniform(0.1, 10.0)) * (1 if rng.random() < 0.5 else -1)
            assert norm_value(T.scaled(c)) == pytest.approx(
                abs(c) * norm_value(T), rel=1e-12
            )

    def test_maximizers_reproduce_norm(self):
        rng = np.random.default_rng(8)
        for _ in range(15):
            T = random_operator(rng)
            cert = op_norm(T)
            for m in cert.maximizers:
                assert abs(apply(T, m).norm() - cert.norm) <= 1e-9 * max(1, cert.norm)

    def test_independent_pair_vs_brute_force(self):
        rng = np.random.default_rng(9)
        for k in range(12):
            if k % 3 == 0:
                # Norm-one operators attaining twice, from segment endpoints.
                p = float(rng.uniform(1.3, 4.0))
                q = float(rng.uniform(1.3, 4.0))
                x = LpVector.from_mass(float(rng.uniform(0.55, 0.9)), p)
                y = LpVector.from_mass(float(rng.uniform(0.55, 0.9)), q)
                from lpq2.classify import generate_extreme

                T = generate_extreme(x, y, 1)
            else:
                T = random_operator(rng)
                T = T.scaled(1.0 / norm_value(T))
            cert = op_norm(T)
            bf = brute_force_second_maximizer(
                T.entries(), T.domain.value, T.codomain.value, cert.norm, n=100_000
            )
            if bf:
                assert cert.independent_pair
            if not cert.independent_pair:
                assert not bf


class TestAdjoint:
    def test_involution(self):
        rng = np.random.default_rng(10)
        T = random_operator(rng)
        back = adjoint(adjoint(T))
        assert back.entries() == T.entries()
        assert back.domain.value == pytest.approx(T.domain.value, rel=1e-15)
        assert back.codomain.value == pytest.approx(T.codomain.value, rel=1e-15)

    def test_symmetric_hilbert(self):
        T = Operator2x2(1.0, 0.3, 0.3, -0.7, 2, 2)
        A = adjoint(T)
        assert A.entries() == T.entries()
        assert A.domain.value == 2.0 and A.codomain.value == 2.0

    def test_norm_duality(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            T = random_operator(rng)
            assert norm_value(adjoint(T)) == pytest.approx(
                norm_value(T), abs=1e-9 * max(1.0, norm_value(T))
            )


class TestIsContraction:
    def test_identity(self):
        assert is_contraction(Operator2x2(1, 0, 0, 1, 2, 2), 0.0)

    def test_scaled_identity(self):
        assert not is_contraction(Operator2x2(1.01, 0, 0, 1.01, 2, 2), 1e-6)

    def test_segment_endpoint(self):
        rng = np.random.default_rng(12)
        from lpq2.segment import extremal_scale

        for _ in range(5):
            p = float(rng.uniform(1.3, 4.0))
            q = float(rng.uniform(1.3, 4.0))
            x = LpVector.from_mass(float(rng.uniform(0.55, 0.9)), p)
            y = LpVector.from_mass(float(rng.uniform(0.55, 0.9)), q)
            s = extremal_scale(x, y, 1).value
            assert is_contraction(pinned_operator(x, y, s), 1e-8)

    def test_rejects_negative_tol(self):
        with pytest.raises(ValueError):
            is_contraction(Operator2x2(1, 0, 0, 1, 2, 2), -1.0)
