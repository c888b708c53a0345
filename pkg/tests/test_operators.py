import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_tensor, tensor_pairs
from polaralg import (
    PolarTensor,
    Rotor,
    apply_rotor,
    fft_angular,
    ifft_angular,
    polar_product_naive,
    rotor_spectrum,
)
from polaralg.gradcheck import linear_loss, numerical_gradient, relative_error
from polaralg.operators import (
    PeriodicGate,
    PolarGridSpec,
    SpectralDense,
    SymmetricMixer,
    build_gate_kernel,
    cartesian_to_polar,
    compose_dense,
    energy_ratio,
    gate_apply,
    gate_gradients,
    gate_target_profile,
    jacobian_weight,
    low_frequency_mask,
    polar_dense_forward,
    polar_dense_gradient,
    polar_dense_input_gradient,
    pool_low_quadrants,
    radial_equalize,
    signed_frequencies,
    spectral_rms_norm,
    spectral_rms_norm_gradient,
    symmetric_channel_mix,
    symmetric_channel_mix_gradient,
    tukey_taper,
)


def spec_of(values, axes=None):
    return PolarTensor(values, axes, domain="spectral")


def random_spectrum(rng, shape):
    return spec_of(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


class TestDense:
    def test_identity(self, rng):
        s = random_spectrum(rng, (3, 8))
        np.testing.assert_array_equal(SpectralDense.identity((3, 8))(s).values, s.values)

    def test_rotor_weights(self, rng):
        a = random_tensor(rng, (2, 7))
        layer = SpectralDense(rotor_spectrum(Rotor(3), a.shape).values)
        got = ifft_angular(layer(fft_angular(a))).values
        np.testing.assert_allclose(got, apply_rotor(Rotor(3), a).values, atol=1e-12)

    def test_convolution_weights(self):
        k, x = PolarTensor([[2, 1, 1, 1]]), PolarTensor([[1, 0, 1, 0]])
        layer = SpectralDense(fft_angular(k).values)
        want = fft_angular(polar_product_naive(k, x)).values
        np.testing.assert_allclose(layer(fft_angular(x)).values, want, atol=1e-12)

    def test_errors(self, rng):
        with pytest.raises(ValueError):
            SpectralDense(np.ones((2, 4)))(random_spectrum(rng, (2, 5)))
        with pytest.raises(ValueError):
            SpectralDense(np.full((2, 4), 1j), real_constrained=True)
        with pytest.raises(ValueError):
            polar_dense_forward(SpectralDense(np.ones((2, 4))), PolarTensor(np.ones((2, 4))))

    def test_frequency_decoupling(self, rng):
        s = random_spectrum(rng, (3, 8))
        w = rng.standard_normal((3, 8)) + 1j * rng.standard_normal((3, 8))
        base = SpectralDense(w)(s).values
        w2 = w.copy()
        w2[1, 5] += 0.7 - 0.2j
        diff = SpectralDense(w2)(s).values - base
        changed = np.zeros((3, 8), dtype=bool)
        changed[1, 5] = True
        assert np.all(diff[~changed] == 0)
        assert diff[1, 5] != 0

    def test_composition(self, rng):
        s = random_spectrum(rng, (2, 9))
        layers = [SpectralDense(rng.standard_normal((2, 9)) + 1j * rng.standard_normal((2, 9))) for _ in range(4)]
        seq = s
        for layer in layers:
            seq = layer(seq)
        np.testing.assert_allclose(compose_dense(layers)(s).values, seq.values, atol=1e-10)

    def test_gradient_hand_example(self):
        # L = |W x|^2 / 2 with W = 1, x = 2: dL/dRe(W) = Re(conj(y) x) = 4
        layer = SpectralDense([[1.0]])
        x = spec_of([[2.0]])
        y = layer(x)
        grad = polar_dense_gradient(layer, x, y.with_values(y.values))
        assert grad[0, 0] == 4
        assert not np.any(polar_dense_gradient(layer, spec_of([[0.0]]), y))

    @pytest.mark.parametrize("constrained", [False, True])
    def test_gradient_vs_finite_differences(self, rng, constrained):
        s = random_spectrum(rng, (4, 8))
        g = random_spectrum(rng, (4, 8))
        w0 = rng.standard_normal((4, 8)) + (0 if constrained else 1j * rng.standard_normal((4, 8)))
        layer = SpectralDense(w0, constrained)
        loss_y = linear_loss(g.values)

        def loss_w(w):
            return loss_y(w * s.values)

        num = numerical_gradient(loss_w, w0, real_only=constrained)
        assert relative_error(polar_dense_gradient(layer, s, g), num) < 1e-5
        num_x = numerical_gradient(lambda x: loss_y(layer.weights * x), s.values)
        assert relative_error(polar_dense_input_gradient(layer, g).values, num_x) < 1e-5

    def test_quadratic_loss_gradient(self, rng):
        s = random_spectrum(rng, (2, 5))
        w0 = rng.standard_normal((2, 5)) + 1j * rng.standard_normal((2, 5))
        layer = SpectralDense(w0)
        y = layer(s)
        # for L = ||y||^2 / 2 the upstream gradient is y itself
        num = numerical_gradient(lambda w: 0.5 * np.sum(np.abs(w * s.values) ** 2), w0)
        assert relative_error(polar_dense_gradient(layer, s, y), num) < 1e-5


@settings(max_examples=40, deadline=None)
@given(tensor_pairs(count=1), st.integers(-20, 20), st.integers(0, 2**31))
def test_dense_rotation_equivariance(pair, k, seed):
    (a,) = pair
    rng = np.random.default_rng(seed)
    layer = SpectralDense(rng.standard_normal(a.shape) + 1j * rng.standard_normal(a.shape))
    lhs = ifft_angular(layer(fft_angular(apply_rotor(Rotor(k), a)))).values
    rhs = apply_rotor(Rotor(k), ifft_angular(layer(fft_angular(a)))).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-10 * max(1.0, np.max(np.abs(rhs))))


class TestGateConstruction:
    def test_signed_frequencies(self):
        np.testing.assert_array_equal(signed_frequencies(6), [0, 1, 2, 3, -2, -1])
        np.testing.assert_array_equal(signed_frequencies(5), [0, 1, 2, -2, -1])

    def test_tukey(self):
        np.testing.assert_array_equal(tukey_taper(4, 0.0), np.ones(5))
        np.testing.assert_allclose(tukey_taper(4, 0.5), [1, 1, 1, 0.5, 0], atol=1e-15)
        np.testing.assert_allclose(tukey_taper(2, 1.0), [1, 0.5, 0], atol=1e-15)
        np.testing.assert_array_equal(tukey_taper(0, 0.5), [1])
        with pytest.raises(ValueError):
            tukey_taper(3, 1.5)

    def test_target_profile_is_even_silu(self):
        p = gate_target_profile(16)
        np.testing.assert_allclose(p, np.roll(p[::-1], 1), atol=1e-15)
        assert p[0] == pytest.approx(3 / (1 + np.exp(-3)))

    def test_band_zero_is_uniform_scaling(self, rng):
        g = build_gate_kernel(0, 0.5, 8, strength=1.0)
        assert np.count_nonzero(g.kernel_spectrum) == 1
        s = random_spectrum(rng, (2, 8))
        mask = np.ones(8, dtype=bool)
        out = gate_apply(g, s, mask).values
        np.testing.assert_allclose(out, g.kernel_spectrum[0] / 8 * s.values, atol=1e-14)

    def test_rectangular_window_untapered(self):
        g = build_gate_kernel(3, 0.0, 16, real_constrained=False)
        spec = np.fft.fft(gate_target_profile(16))
        keep = np.abs(signed_frequencies(16)) <= 3
        np.testing.assert_allclose(g.kernel_spectrum[keep], spec[keep], atol=1e-14)
        assert not np.any(g.kernel_spectrum[~keep])

    def test_real_constrained_kernel(self):
        g = build_gate_kernel(4, 0.5, 32)
        assert not np.any(g.kernel_spectrum.imag)
        assert not np.any(g.kernel_spectrum[5:28])
        w = g.spatial_kernel()
        np.testing.assert_allclose(w, np.roll(w[::-1], 1), atol=1e-12)
        assert np.max(np.abs(w.imag)) < 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            build_gate_kernel(17, 0.5, 32)
        with pytest.raises(ValueError):
            PeriodicGate(np.ones(8), band=1)
        with pytest.raises(ValueError):
            PeriodicGate(np.array([1j, 0, 0, 0]), band=0)
        with pytest.raises(ValueError):
            PeriodicGate(np.array([1, 0, 0, 0]), band=0, strength=1.5)


class TestGateApply:
    def test_strength_zero_identity(self, rng):
        s = random_spectrum(rng, (3, 16))
        g = build_gate_kernel(4, 0.5, 16, strength=0.0)
        mask = low_frequency_mask((16,), 4)
        np.testing.assert_array_equal(gate_apply(g, s, mask).values, s.values)
        assert energy_ratio(s, gate_apply(g, s, mask), mask) == 1.0

    def test_scaled_delta(self, rng):
        n = 8
        s = random_spectrum(rng, (2, n))
        mask = low_frequency_mask((n,), 2)
        w = np.zeros(n)
        w[0] = n
        out = gate_apply(PeriodicGate(w, band=0), s, mask).values
        np.testing.assert_allclose(out, s.values, atol=1e-14)
        w = np.zeros(n)
        w[1] = n
        out = gate_apply(PeriodicGate(w, band=1), s, mask).values
        shifted = np.roll(s.values, 1, axis=1)
        np.testing.assert_allclose(out[:, mask], shifted[:, mask], atol=1e-14)
        np.testing.assert_array_equal(out[:, ~mask], s.values[:, ~mask])

    def test_matches_direct_sum(self, rng):
        n = 12
        g = build_gate_kernel(3, 0.5, n, real_constrained=False, strength=0.6)
        s = random_spectrum(rng, (2, n))
        mask = low_frequency_mask((n,), 3)
        w, x = g.kernel_spectrum, s.values
        want = x.copy()
        for r in range(2):
            for k in np.flatnonzero(mask):
                y = sum(w[m] * x[r, (k - m) % n] for m in range(n)) / n
                want[r, k] = 0.4 * x[r, k] + 0.6 * y
        np.testing.assert_allclose(gate_apply(g, s, mask).values, want, atol=1e-13)

    def test_channel_and_two_axis_layouts(self, rng):
        g = build_gate_kernel(2, 0.5, 8, strength=0.5)
        s = random_spectrum(rng, (2, 3, 8)).with_values(rng.standard_normal((2, 3, 8)))
        s = spec_of(s.values, (2,))
        mask = low_frequency_mask((8,), 2)
        out = gate_apply(g, s, mask).values
        for c in range(3):
            single = gate_apply(g, spec_of(s.values[:, c]), mask).values
            np.testing.assert_allclose(out[:, c], single, atol=1e-14)
        s2 = random_spectrum(rng, (2, 8, 6))
        mask2 = low_frequency_mask((8, 6), 2)
        out2 = gate_apply(g, s2, mask2).values
        np.testing.assert_array_equal(out2[:, ~mask2], s2.values[:, ~mask2])
        with pytest.raises(ValueError):
            gate_apply(g, s2, mask)

    def test_residual_safety(self, rng):
        for _ in range(50):
            n = int(rng.choice([8, 12, 16]))
            band = int(rng.integers(0, n // 2 + 1))
            strength = float(rng.uniform())
            g = build_gate_kernel(band, float(rng.uniform()), n, bool(rng.integers(2)), strength)
            s = random_spectrum(rng, (3, n))
            mask = low_frequency_mask((n,), band)
            diff = gate_apply(g, s, mask).values - s.values
            bound = strength * np.linalg.norm(s.values) * (1 + np.sum(np.abs(g.kernel_spectrum)) / n)
            assert np.linalg.norm(diff[:, mask]) <= bound + 1e-12
            assert not np.any(diff[:, ~mask])

    def test_gradients(self, rng):
        n = 8
        g = build_gate_kernel(2, 0.5, n, real_constrained=False, strength=0.7)
        s = random_spectrum(rng, (2, n))
        up = random_spectrum(rng, (2, n))
        mask = low_frequency_mask((n,), 2)
        loss = linear_loss(up.values)
        grads = gate_gradients(g, s, mask, up)

        def via_kernel(w):
            gate = PeriodicGate(w, n // 2, strength=g.strength, real_spectrum_constrained=False)
            return loss(gate_apply(gate, s, mask).values)

        num_w = numerical_gradient(via_kernel, g.kernel_spectrum)
        assert relative_error(grads.kernel, num_w) < 1e-5
        num_x = numerical_gradient(lambda x: loss(gate_apply(g, spec_of(x), mask).values), s.values)
        assert relative_error(grads.input.values, num_x) < 1e-5
        h = 1e-6

        def via_strength(t):
            gate = PeriodicGate(g.kernel_spectrum, g.band, strength=t, real_spectrum_constrained=False)
            return loss(gate_apply(gate, s, mask).values)

        num_s = (via_strength(0.7 + h) - via_strength(0.7 - h)) / (2 * h)
        assert grads.strength == pytest.approx(num_s, rel=1e-5)


class TestEnergyRatio:
    def test_examples(self, rng):
        s = random_spectrum(rng, (2, 8))
        mask = low_frequency_mask((8,), 2)
        assert energy_ratio(s, s, mask) == 1.0
        assert energy_ratio(s, 0.5 * s, mask) == pytest.approx(0.5, rel=1e-15)
        zero = spec_of(np.zeros((2, 8)))
        assert energy_ratio(zero, s, mask) == float("inf")
        assert energy_ratio(zero, zero, mask) == 1.0


class TestRadialEqualize:
    def test_examples(self):
        out = radial_equalize(PolarTensor(np.full((3, 5), 4.0)), "statistics")
        np.testing.assert_array_equal(out.values, 0)
        out = radial_equalize(PolarTensor([[1, 3], [10, 30]]), "statistics")
        np.testing.assert_allclose(out.values, [[-1, 1], [-1, 1]], atol=1e-15)
        out = radial_equalize(PolarTensor(np.ones((2, 3))), "jacobian")
        np.testing.assert_allclose(out.values, [[0.5] * 3, [np.sqrt(0.75)] * 3], atol=1e-15)

    def test_both_and_weights(self, rng):
        x = rng.standard_normal((4, 9)) * 5 + 2
        out = radial_equalize(PolarTensor(x)).values.real
        w = jacobian_weight(4)
        assert np.max(w) <= 1
        np.testing.assert_allclose(out.mean(axis=1), 0, atol=1e-14)
        np.testing.assert_allclose(out.std(axis=1), w, atol=1e-12)
        custom = radial_equalize(PolarTensor(np.ones((3, 2))), "jacobian", weight=lambda n: np.arange(n))
        np.testing.assert_array_equal(custom.values.real, [[0, 0], [1, 1], [2, 2]])

    def test_rejects(self):
        with pytest.raises(ValueError):
            radial_equalize(PolarTensor([[1j, 0]]))
        with pytest.raises(ValueError):
            radial_equalize(PolarTensor([[1, 0]]), "bogus")


class TestResampling:
    def test_grid(self):
        spec = PolarGridSpec(4, 8, 2.0)
        np.testing.assert_allclose(spec.radii(), [0.25, 0.75, 1.25, 1.75])
        np.testing.assert_allclose(spec.angles()[2], np.pi / 2)
        for bad in [(0, 4, 1.0), (2, 0, 1.0), (2, 4, 0.0)]:
            with pytest.raises(ValueError):
                PolarGridSpec(*bad)

    def test_constant_image(self):
        img = np.full((28, 28), 3.5)
        out = cartesian_to_polar(img, PolarGridSpec.centered(img.shape, 10, 16))
        np.testing.assert_allclose(out.values, 3.5, atol=1e-13)

    def test_outside_reads_zero(self):
        img = np.ones((5, 5))
        out = cartesian_to_polar(img, PolarGridSpec(2, 4, 20.0, center=(2.0, 2.0)))
        np.testing.assert_array_equal(out.values, 0)

    def test_orientation(self):
        # theta = 0 along +x (columns), theta = pi/2 along +y (rows)
        img = np.zeros((9, 9))
        img[4, 7] = 1.0
        img[7, 4] = 2.0
        out = cartesian_to_polar(img, PolarGridSpec(1, 4, 6.0, center=(4.0, 4.0))).values.real
        np.testing.assert_allclose(out[0], [1, 2, 0, 0], atol=1e-13)

    def test_radial_distance_field_exact_on_axes(self):
        n, c, R = 256, 128, 100
        yy, xx = np.mgrid[0:n, 0:n]
        dist = np.hypot(xx - c, yy - c)
        spec = PolarGridSpec(R, 4, float(R), center=(float(c), float(c)))
        out = cartesian_to_polar(dist, spec).values.real
        assert np.max(np.abs(out - spec.radii()[:, None])) < 1e-6

    def test_radial_distance_field_general_angles(self):
        n = 256
        yy, xx = np.mgrid[0:n, 0:n]
        c = (n - 1) / 2
        dist = np.hypot(xx - c, yy - c)
        spec = PolarGridSpec.centered((n, n), 64, 32)
        out = cartesian_to_polar(dist, spec).values.real
        rho = spec.radii()[:, None]
        # bilinear error of a cone is curvature-limited: about 1 / (4 rho)
        assert np.all(np.abs(out - rho) <= 0.25 / rho + 1e-12)

    def test_quarter_turn_is_rotor(self, rng):
        img = rng.standard_normal((28, 28))
        spec = PolarGridSpec.centered(img.shape, 10, 4)
        base = cartesian_to_polar(img, spec)
        turned = cartesian_to_polar(np.rot90(img, k=-1), spec)
        np.testing.assert_allclose(turned.values, apply_rotor(Rotor(1), base).values, atol=1e-12)
        spec16 = PolarGridSpec.centered(img.shape, 10, 16)
        base16 = cartesian_to_polar(img, spec16)
        turned16 = cartesian_to_polar(np.rot90(img, k=-1), spec16)
        np.testing.assert_allclose(turned16.values, apply_rotor(Rotor(4), base16).values, atol=1e-12)


class TestRmsNorm:
    def test_examples(self, rng):
        out = spectral_rms_norm(spec_of([[3 + 4j, 0, 0, 0]]), eps=0)
        np.testing.assert_allclose(out.values, [[1.2 + 1.6j, 0, 0, 0]], atol=1e-15)
        s = random_spectrum(rng, (3, 8))
        unit = s.with_values(s.values / np.sqrt(np.mean(np.abs(s.values) ** 2, axis=1, keepdims=True)))
        np.testing.assert_allclose(spectral_rms_norm(unit, eps=0).values, unit.values, atol=1e-14)
        np.testing.assert_allclose(spectral_rms_norm(2 * s).values, spectral_rms_norm(s).values, atol=1e-8)
        np.testing.assert_array_equal(spectral_rms_norm(spec_of(np.zeros((1, 4))), eps=0).values, 0)
        with pytest.raises(ValueError):
            spectral_rms_norm(s, eps=-1)
        with pytest.raises(ValueError):
            spectral_rms_norm(s, scope="bogus")

    def test_scopes(self, rng):
        s = random_spectrum(rng, (2, 6))
        every = spectral_rms_norm(s, "all", eps=0).values
        assert np.mean(np.abs(every) ** 2) == pytest.approx(1.0)
        signed = spectral_rms_norm(s, "frequency_sign", eps=0).values
        pos = signed_frequencies(6) >= 0
        np.testing.assert_allclose(np.mean(np.abs(signed[:, pos]) ** 2, axis=1), 1.0)
        np.testing.assert_allclose(np.mean(np.abs(signed[:, ~pos]) ** 2, axis=1), 1.0)

    @pytest.mark.parametrize("scope", ["angular", "frequency_sign", "all"])
    def test_gradient(self, rng, scope):
        s = random_spectrum(rng, (3, 6))
        up = random_spectrum(rng, (3, 6))
        loss = linear_loss(up.values)
        num = numerical_gradient(lambda x: loss(spectral_rms_norm(spec_of(x), scope).values), s.values)
        got = spectral_rms_norm_gradient(s, up, scope).values
        assert relative_error(got, num) < 1e-5


class TestChannelMix:
    def test_examples(self, rng):
        s = random_spectrum(rng, (2, 2, 5))
        s = spec_of(s.values, (2,))
        np.testing.assert_array_equal(symmetric_channel_mix(SymmetricMixer.from_matrix(np.eye(2)), s).values, s.values)
        out = symmetric_channel_mix(SymmetricMixer.from_matrix(np.diag([2.0, 3.0])), s).values
        np.testing.assert_allclose(out[:, 0], 2 * s.values[:, 0])
        np.testing.assert_allclose(out[:, 1], 3 * s.values[:, 1])

    def test_real_eigenvalues(self, rng):
        for _ in range(50):
            a = rng.standard_normal((4, 4))
            mixer = SymmetricMixer.from_matrix(a + a.T)
            assert np.max(np.abs(np.imag(mixer.eigenvalues()))) < 1e-12
            np.testing.assert_array_equal(mixer.matrix, mixer.matrix.T)

    def test_rejects_asymmetric(self, rng):
        with pytest.raises(ValueError):
            SymmetricMixer.from_matrix([[1, 2], [3, 4]])
        with pytest.raises(ValueError):
            SymmetricMixer([1, 2])
        with pytest.raises(ValueError):
            # axis 1 is angular here, so it cannot be the channel axis
            symmetric_channel_mix(SymmetricMixer([1, 0, 1]), random_spectrum(rng, (2, 2)), 1)

    def test_gradient(self, rng):
        a = rng.standard_normal((3, 3))
        mixer = SymmetricMixer.from_matrix(a + a.T)
        s = spec_of(random_spectrum(rng, (2, 3, 4)).values, (2,))
        up = spec_of(random_spectrum(rng, (2, 3, 4)).values, (2,))
        loss = linear_loss(up.values)
        g_upper, g_in = symmetric_channel_mix_gradient(mixer, s, up)
        num_u = numerical_gradient(
            lambda u: loss(symmetric_channel_mix(SymmetricMixer(u.real), s).values), mixer.upper, real_only=True
        )
        assert relative_error(g_upper, num_u) < 1e-5
        num_x = numerical_gradient(lambda x: loss(symmetric_channel_mix(mixer, spec_of(x, (2,))).values), s.values)
        assert relative_error(g_in.values, num_x) < 1e-5


class TestPooling:
    def test_examples(self):
        mask = low_frequency_mask((4,), 1)
        zero = pool_low_quadrants(spec_of(np.zeros((2, 4))), mask)
        np.testing.assert_array_equal(zero, 0)
        single = np.zeros((1, 4), dtype=complex)
        single[0, 1] = 1.0
        mask4 = np.ones(4, dtype=bool)
        raw = pool_low_quadrants(spec_of(single), mask4, normalize=False)
        np.testing.assert_allclose(raw, [0.25, 0.0])
        with pytest.raises(ValueError):
            pool_low_quadrants(spec_of(single), np.zeros(4, dtype=bool))

    def test_norm_bounded_and_layout(self, rng):
        for _ in range(30):
            s = spec_of(random_spectrum(rng, (3, 2, 8)).values * rng.uniform(0, 100), (2,))
            f = pool_low_quadrants(s, low_frequency_mask((8,), 2), channel_axis=1, radius_groups=[[0], [1, 2]])
            assert f.shape == (2 * 2 * 2,)
            assert np.linalg.norm(f) <= 1 + 1e-9
