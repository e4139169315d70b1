import numpy as np
import pytest

from app.core.errors import BadMagic, ManifestInvalid, Truncated, VersionUnsupported
from app.pruning import build_mask_l1_global, build_mask_random, load_mask, save_mask
from tests.conftest import GOLDEN, dense_model, random_mlp


def golden_mask():
    model = dense_model([[0.5, -0.1], [0.3, -0.7]], bias=[0.0, 0.2])
    return build_mask_l1_global(model, 0.5)


class TestMaskSidecar:
    def test_golden_bytes(self):
        assert save_mask(golden_mask()) == (GOLDEN / "example.pfqmask").read_bytes()

    def test_load_golden(self):
        mask = load_mask((GOLDEN / "example.pfqmask").read_bytes())
        np.testing.assert_array_equal(mask.bits, [1, 0, 1, 1, 0, 0])
        assert mask.rho == 0.5
        assert mask.seed is None

    def test_random_mask_keeps_seed(self):
        mask = build_mask_random(random_mlp([4, 9, 3], seed=0), 0.4, seed=77)
        restored = load_mask(save_mask(mask))
        assert restored.seed == 77
        assert restored.bits.tobytes() == mask.bits.tobytes()

    def test_not_a_mask(self):
        with pytest.raises(BadMagic):
            load_mask(b"PFQM\x01\x00")

    def test_wrong_format_tag(self):
        payload = save_mask(golden_mask()).replace(b'"pfqmask"', b'"pfqmodel"')
        with pytest.raises(BadMagic):
            load_mask(payload)

    def test_version(self):
        payload = save_mask(golden_mask()).replace(b'"version":1', b'"version":9')
        with pytest.raises(VersionUnsupported):
            load_mask(payload)

    def test_truncated(self):
        with pytest.raises(Truncated):
            load_mask(save_mask(golden_mask())[:-1])

    def test_trailing_bytes(self):
        with pytest.raises(ManifestInvalid):
            load_mask(save_mask(golden_mask()) + b"\x00")
