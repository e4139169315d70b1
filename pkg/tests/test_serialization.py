import json
import struct

import numpy as np
import pytest

from app.core.errors import BadMagic, ManifestInvalid, Truncated, VersionUnsupported
from app.model.serialization import build_manifest, load_model, save_model
from tests.conftest import GOLDEN, dense_model, random_mlp
from tests.test_model import conv_model


class TestGoldenFile:
    def test_identity_model_bytes(self):
        assert save_model(dense_model(np.eye(2))) == (GOLDEN / "identity_2d.pfqm").read_bytes()

    def test_golden_manifest(self):
        payload = (GOLDEN / "identity_2d.pfqm").read_bytes()
        magic, version, length = struct.unpack_from("<4sIQ", payload)
        assert (magic, version) == (b"PFQM", 1)
        manifest = payload[16 : 16 + length]
        assert manifest == (GOLDEN / "identity_2d.manifest.json").read_bytes().strip()
        assert json.loads(manifest) == build_manifest(dense_model(np.eye(2)))

    def test_load_golden(self):
        model = load_model((GOLDEN / "identity_2d.pfqm").read_bytes())
        assert model.bit_equal(dense_model(np.eye(2)))


class TestRoundTrip:
    @pytest.mark.parametrize("seed", range(5))
    def test_mlp(self, seed):
        model = random_mlp([5, 7, 3], seed=seed)
        assert load_model(save_model(model)).bit_equal(model)

    def test_conv_with_batchnorm(self):
        model = conv_model()
        assert load_model(save_model(model)).bit_equal(model)

    def test_signed_zero_survives(self):
        model = dense_model([[1.0, -0.0], [0.0, 1.0]])
        restored = load_model(save_model(model))
        assert np.signbit(restored.params[0][0][0, 1])


class TestCorruptStreams:
    payload = save_model(dense_model(np.eye(2)))

    def test_bad_magic(self):
        with pytest.raises(BadMagic):
            load_model(b"XXXX" + self.payload[4:])

    def test_version(self):
        with pytest.raises(VersionUnsupported):
            load_model(self.payload[:4] + struct.pack("<I", 2) + self.payload[8:])

    def test_truncated_parameters(self):
        with pytest.raises(Truncated):
            load_model(self.payload[:-3])

    def test_truncated_header(self):
        with pytest.raises(Truncated):
            load_model(self.payload[:10])

    def test_trailing_bytes(self):
        with pytest.raises(ManifestInvalid):
            load_model(self.payload + b"\x00\x00\x00\x00")

    def test_garbled_manifest(self):
        _, _, length = struct.unpack_from("<4sIQ", self.payload)
        broken = self.payload[:16] + b"{" * length + self.payload[16 + length :]
        with pytest.raises(ManifestInvalid):
            load_model(broken)
