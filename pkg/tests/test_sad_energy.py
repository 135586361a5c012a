import numpy as np
import pytest

from sadkit.audio import FramingSpec, Waveform, frame_signal
from sadkit.sad import (
    AverageEnergyDetector,
    MaxEnergyDetector,
    average_energy_mask,
    max_energy_mask,
)


class TestAverageEnergyMask:
    def test_all_above_threshold(self):
        np.testing.assert_array_equal(
            average_energy_mask(np.array([1.0, 2.0, 3.0, 4.0])), [True] * 4
        )

    def test_mixed(self):
        # mean 5.05 -> threshold 0.303
        np.testing.assert_array_equal(average_energy_mask(np.array([0.1, 10.0])), [False, True])

    def test_all_zero_is_all_nonspeech(self):
        np.testing.assert_array_equal(average_energy_mask(np.zeros(5)), [False] * 5)

    def test_scale_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            energies = rng.uniform(0, 5, int(rng.integers(1, 100)))
            scale = float(rng.uniform(0.01, 100.0))
            np.testing.assert_array_equal(
                average_energy_mask(energies), average_energy_mask(scale * energies)
            )


class TestMaxEnergyMask:
    def test_margin_30(self):
        mask = max_energy_mask(np.array([0.0, -10.0, -40.0]), margin_db=30.0)
        np.testing.assert_array_equal(mask, [True, True, False])

    def test_single_frame_is_speech(self):
        assert max_energy_mask(np.array([-55.0])).all()

    def test_zero_margin_keeps_argmax_only(self):
        mask = max_energy_mask(np.array([-3.0, -1.0, -2.0, -1.0]), margin_db=0.0)
        np.testing.assert_array_equal(mask, [False, True, False, True])

    def test_shift_invariance(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            energies_db = rng.uniform(-80, 0, int(rng.integers(1, 100)))
            shift = float(rng.uniform(-40, 40))
            np.testing.assert_array_equal(
                max_energy_mask(energies_db), max_energy_mask(energies_db + shift)
            )


class TestDetectors:
    def make_frames(self):
        x = np.concatenate([np.full(320, 1e-4), 0.4 * np.ones(320), np.full(320, 1e-4)])
        return frame_signal(Waveform(x, 8000, "u"), FramingSpec(20.0, 10.0))

    def test_average_detector_mask_length(self):
        frames = self.make_frames()
        mask = AverageEnergyDetector().mask(frames)
        assert len(mask) == frames.num_frames
        assert mask.source_id == "u"
        assert mask.decisions.any() and not mask.decisions.all()

    def test_max_detector_finds_loud_region(self):
        frames = self.make_frames()
        decisions = MaxEnergyDetector(margin_db=30.0).predict(frames)
        assert decisions.sum() >= 2
        assert not decisions[0] and not decisions[-1]

    def test_get_params_roundtrip(self):
        det = MaxEnergyDetector(margin_db=25.0)
        assert det.get_params() == {"margin_db": 25.0}
        det.set_params(margin_db=10.0)
        assert det.margin_db == 10.0

    def test_empty_energy_error(self):
        with pytest.raises(ValueError):
            average_energy_mask(np.array([]))
