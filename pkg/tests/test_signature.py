"""Signature scheme: reference vectors, determinism, and sensitivity."""

import hashlib

import pytest

from tilecast import kernels
from tilecast.errors import PixelBufferError
from tilecast.protocol import TilePos, is_signature, signature_prefix, tile_signature

# Canonical MD5 test-suite vectors (independent published reference values).
MD5_VECTORS = {
    b"": "d41d8cd98f00b204e9800998ecf8427e",
    b"a": "0cc175b9c0f1b6a831c399e269772661",
    b"abc": "900150983cd24fb0d6963f7d28e17f72",
    b"message digest": "f96b697d7cb7938d525a2f31aaf161d0",
    b"abcdefghijklmnopqrstuvwxyz": "c3fcd3d76192e4007dfb496cca67e13b",
}


class TestMd5Primitive:
    @pytest.mark.parametrize("message,expected", MD5_VECTORS.items())
    def test_reference_vectors(self, message, expected):
        assert kernels.md5_hex(message) == expected

    def test_matches_hashlib_on_random_input(self):
        import random

        rng = random.Random(123)
        for _ in range(50):
            blob = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 300)))
            assert kernels.md5_hex(blob) == hashlib.md5(blob).hexdigest()


class TestTileSignature:
    PIXELS = bytes(range(256)) * 4  # 16x16 RGBA

    def oracle(self, url: str, col: int, row: int, pixels: bytes) -> str:
        """Independent digest construction straight from the documented layout."""
        payload = url.encode() + b"\x00" + f"{col},{row}".encode() + b"\x00" + pixels
        return hashlib.md5(payload).hexdigest()

    def test_deterministic(self):
        a = tile_signature("https://x.test/", TilePos(2, 3), self.PIXELS)
        b = tile_signature("https://x.test/", TilePos(2, 3), self.PIXELS)
        assert a == b
        assert is_signature(a)

    def test_matches_documented_layout(self):
        got = tile_signature("https://x.test/", TilePos(2, 3), self.PIXELS, 16, 16)
        assert got == self.oracle("https://x.test/", 2, 3, self.PIXELS)

    def test_position_sensitivity(self):
        a = tile_signature("u", TilePos(0, 0), self.PIXELS)
        b = tile_signature("u", TilePos(1, 0), self.PIXELS)
        assert a != b
        assert a == self.oracle("u", 0, 0, self.PIXELS)
        assert b == self.oracle("u", 1, 0, self.PIXELS)

    def test_url_sensitivity(self):
        assert tile_signature("u1", TilePos(0, 0), self.PIXELS) != tile_signature(
            "u2", TilePos(0, 0), self.PIXELS
        )

    def test_pixel_sensitivity(self):
        other = bytes([self.PIXELS[0] ^ 1]) + self.PIXELS[1:]
        assert tile_signature("u", TilePos(0, 0), self.PIXELS) != tile_signature(
            "u", TilePos(0, 0), other
        )

    def test_separator_prevents_ambiguity(self):
        # url "a" + col 12 must not collide with url "a1" + col 2
        assert signature_prefix("a", TilePos(12, 3)) != signature_prefix("a1", TilePos(2, 3))
        assert tile_signature("a", TilePos(12, 3), self.PIXELS) != tile_signature(
            "a1", TilePos(2, 3), self.PIXELS
        )

    def test_length_validation(self):
        with pytest.raises(PixelBufferError):
            tile_signature("u", TilePos(0, 0), self.PIXELS, width=16, height=17)
        with pytest.raises(PixelBufferError):
            tile_signature("u", TilePos(0, 0), b"")
        with pytest.raises(PixelBufferError):
            tile_signature("u", TilePos(0, 0), b"abc")

    def test_small_collision_corpus(self):
        # full 10^4 corpus runs in the acceptance suite
        seen = set()
        pixels = self.PIXELS
        for col in range(10):
            for row in range(10):
                for url in ("a.test", "b.test"):
                    seen.add(tile_signature(url, TilePos(col, row), pixels))
        assert len(seen) == 200
