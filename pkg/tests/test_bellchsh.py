import numpy as np
import pytest

from onticlab.bellchsh import (
    ChshSetting,
    CorrelationTensor,
    bell_states,
    chsh_grid_max,
    chsh_value,
    correlation_tensor,
    horodecki_max,
)
from onticlab.qcore import (
    BlochVector,
    PureState,
    basis_state,
    random_pure_state,
    tensor_product,
)

TSIRELSON = 2.0 * np.sqrt(2.0)

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def tensor_oracle(state: PureState) -> np.ndarray:
    """Direct 4x4 matrix expectation, independent of the implementation."""
    v = state.amplitudes
    out = np.empty((3, 3))
    for m, sm in enumerate((_SX, _SY, _SZ)):
        for n, sn in enumerate((_SX, _SY, _SZ)):
            out[m, n] = np.real(np.conj(v) @ np.kron(sm, sn) @ v)
    return out


def standard_setting() -> ChshSetting:
    s = 1.0 / np.sqrt(2.0)
    return ChshSetting(
        a=BlochVector([0.0, 0.0, 1.0]),
        a_prime=BlochVector([1.0, 0.0, 0.0]),
        b=BlochVector([s, 0.0, s]),
        b_prime=BlochVector([-s, 0.0, s]),
    )


def test_phi_plus_tensor_is_diag_1_m1_1():
    phi_plus = bell_states()[0]
    T = correlation_tensor(phi_plus).matrix
    assert np.allclose(T, np.diag([1.0, -1.0, 1.0]), atol=1e-12)
    assert np.allclose(T, tensor_oracle(phi_plus), atol=1e-12)


def test_product_zero_state_tensor():
    s00 = tensor_product(basis_state(2, 0), basis_state(2, 0))
    T = correlation_tensor(s00).matrix
    assert np.allclose(T, np.diag([0.0, 0.0, 1.0]), atol=1e-12)


def test_tensor_matches_oracle_on_random_states():
    for seed in range(15):
        state = random_pure_state(4, seed)
        T = correlation_tensor(state).matrix
        assert np.abs(T - tensor_oracle(state)).max() < 1e-12
        assert np.abs(T).max() <= 1.0 + 1e-9


def test_tensor_requires_two_qubits():
    with pytest.raises(ValueError, match="dim"):
        correlation_tensor(basis_state(3, 0))
    with pytest.raises(ValueError, match="3x3"):
        CorrelationTensor(np.eye(2))


def test_chsh_value_at_standard_setting():
    assert chsh_value(bell_states()[0], standard_setting()) == pytest.approx(
        TSIRELSON, abs=1e-12
    )
    s00 = tensor_product(basis_state(2, 0), basis_state(2, 0))
    assert chsh_value(s00, standard_setting()) == pytest.approx(np.sqrt(2.0), abs=1e-12)


def test_chsh_value_invariant_under_global_phase():
    phi_plus = bell_states()[0]
    rotated = PureState(np.exp(0.7j) * phi_plus.amplitudes)
    setting = standard_setting()
    assert chsh_value(rotated, setting) == pytest.approx(
        chsh_value(phi_plus, setting), abs=1e-12
    )


def test_chsh_value_linear_in_correlations():
    rng = np.random.default_rng(3)
    setting = standard_setting()
    a, ap = setting.a.components, setting.a_prime.components
    b, bp = setting.b.components, setting.b_prime.components
    for seed in range(5):
        state = random_pure_state(4, seed)
        T = correlation_tensor(state).matrix
        direct = a @ T @ (b + bp) + ap @ T @ (b - bp)
        assert chsh_value(state, setting) == pytest.approx(direct, abs=1e-12)


def test_horodecki_closed_forms():
    assert horodecki_max(bell_states()[0]) == pytest.approx(TSIRELSON, abs=1e-12)
    s00 = tensor_product(basis_state(2, 0), basis_state(2, 0))
    assert horodecki_max(s00) == pytest.approx(2.0, abs=1e-12)


def test_bell_states_properties():
    states = bell_states()
    for i, s in enumerate(states):
        assert abs(np.linalg.norm(s.amplitudes) - 1.0) < 1e-12
        assert horodecki_max(s) == pytest.approx(TSIRELSON, abs=1e-12)
        for t in states[i + 1:]:
            assert abs(s.overlap(t)) < 1e-12


def test_grid_search_reaches_maximal_violation():
    value, setting = chsh_grid_max(bell_states()[0], coarse_steps=12, refine_iters=3, seed=1)
    assert value >= 2.82
    assert chsh_value(bell_states()[0], setting) == pytest.approx(value, abs=1e-9)


def test_grid_search_respects_product_bound():
    for seed in range(12):
        state = tensor_product(random_pure_state(2, seed), random_pure_state(2, 500 + seed))
        value, _ = chsh_grid_max(state, coarse_steps=8, refine_iters=2, seed=seed)
        assert value <= 2.0 + 1e-9


def test_product_states_classical_over_random_settings():
    # 100 seeded product states, 1e4 random settings each; the CHSH
    # combination a.T(b+b') + a'.T(b-b') must never leave [-2, 2]
    rng = np.random.default_rng(123)
    worst = 0.0
    for seed in range(100):
        state = tensor_product(random_pure_state(2, seed), random_pure_state(2, 700 + seed))
        T = correlation_tensor(state).matrix
        vecs = rng.normal(size=(4, 10_000, 3))
        vecs /= np.linalg.norm(vecs, axis=2, keepdims=True)
        a, ap, b, bp = vecs
        values = np.einsum("ki,ij,kj->k", a, T, b + bp) + np.einsum(
            "ki,ij,kj->k", ap, T, b - bp
        )
        worst = max(worst, float(np.abs(values).max()))
    assert worst <= 2.0 + 1e-9

    # spot-check a sample of settings through chsh_value itself
    state = tensor_product(random_pure_state(2, 3), random_pure_state(2, 703))
    for k in range(50):
        raw = rng.normal(size=(4, 3))
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        setting = ChshSetting(*(BlochVector(v) for v in raw))
        assert abs(chsh_value(state, setting)) <= 2.0 + 1e-9


def test_grid_search_never_exceeds_horodecki():
    for seed in range(12):
        state = random_pure_state(4, 90 + seed)
        value, _ = chsh_grid_max(state, coarse_steps=8, refine_iters=2, seed=seed)
        assert value <= horodecki_max(state) + 1e-6
        assert value <= TSIRELSON + 1e-9


def test_grid_search_deterministic():
    state = random_pure_state(4, 7)
    a = chsh_grid_max(state, coarse_steps=10, refine_iters=2, seed=5)
    b = chsh_grid_max(state, coarse_steps=10, refine_iters=2, seed=5)
    assert a[0] == b[0]
    assert np.array_equal(a[1].a.components, b[1].a.components)


def test_grid_search_validates_arguments():
    with pytest.raises(ValueError, match="coarse_steps"):
        chsh_grid_max(bell_states()[0], coarse_steps=7, refine_iters=2, seed=0)
    with pytest.raises(ValueError, match="refine_iters"):
        chsh_grid_max(bell_states()[0], coarse_steps=8, refine_iters=0, seed=0)
