"""End-to-end checks of the hiding pipeline on synthetic hosts and pages."""
import numpy as np
import pytest

from src.errors import CorruptPayloadError
from src.halftone import to_halftone
from src.metrics import psnr, ssim_global
from src.samples import text_page, textured_host
from src.stego import (EmbedParams, StegoKey, capacity_words, embed, hide_document, prepare_document,
                       reveal_document)


class TestSamples:
    def test_text_page_ink(self):
        for rows, cols in [(64, 64), (256, 192), (512, 512)]:
            page = text_page(rows, cols)
            assert set(np.unique(page).tolist()) == {0, 255}
            assert 0.07 <= float(np.mean(page == 0)) <= 0.13

    def test_blank_page(self):
        assert np.all(text_page(32, 32, ink=0.0) == 255)

    def test_host(self):
        host = textured_host(64, 80, seed=9)
        assert host.shape == (64, 80)
        assert host.max() == 255
        assert np.array_equal(host, textured_host(64, 80, seed=9))


class TestLossless:
    def test_randomized_round_trips(self):
        rng = np.random.default_rng(50)
        for case in range(50):
            size = int(rng.integers(128, 193))
            host = textured_host(size, size, seed=case)
            rows, cols = (int(v) for v in rng.integers(32, 97, size=2))
            page = text_page(rows, cols, ink=float(rng.uniform(0.03, 0.12)), seed=case)
            key = StegoKey(int(rng.integers(0, 1 << 62)) * 2 + 1)
            p = EmbedParams(float(rng.choice([0.0, 2.5, 5.0])))
            min_length = int(rng.choice([2, 4, 8]))

            stego, _ = hide_document(host, page, key, p, min_length=min_length)
            halftone, _ = reveal_document(stego, key, p)
            assert np.array_equal(halftone, to_halftone(page)), case

    def test_wrong_keys_are_detected(self, host, page):
        key = StegoKey(0x5EED)
        p = EmbedParams(2.5)
        stego, _ = hide_document(host, page, key, p)
        rng = np.random.default_rng(1)
        detected = 0
        for _ in range(100):
            wrong = StegoKey(int(rng.integers(0, 1 << 62)) + 1)
            try:
                reveal_document(stego, wrong, p)
            except CorruptPayloadError:
                detected += 1
        assert detected >= 99

    def test_wrong_threshold_is_detected(self, host, page):
        key = StegoKey(17)
        stego, _ = hide_document(host, page, key, EmbedParams(2.5))
        with pytest.raises(CorruptPayloadError):
            reveal_document(stego, key, EmbedParams(40.0))


class TestQuality:
    @pytest.mark.parametrize("seed", [11, 12, 13, 14, 15])
    def test_near_capacity_psnr(self, seed):
        host = textured_host(512, 512, seed=seed)
        p = EmbedParams(0.0)
        rng = np.random.default_rng(seed)
        words = rng.integers(0, 4096, size=capacity_words(host, p))
        stego = embed(host, words, StegoKey(seed), p)
        assert 36.5 <= psnr(host, stego) <= 39.5
        assert ssim_global(host, stego) >= 0.85

    def test_threshold_trend(self):
        host = textured_host(512, 512, seed=21, noise=2.0)
        rng = np.random.default_rng(21)
        capacity, quality = [], []
        for t3 in (0.0, 2.5, 5.0):
            p = EmbedParams(t3)
            available = capacity_words(host, p)
            stego = embed(host, rng.integers(0, 4096, size=available), StegoKey(21), p)
            capacity.append(available)
            quality.append(psnr(host, stego))
        # with 5-MSB samples any non-flat window has SD >= 8 * sqrt(1/9) > 2.5
        assert capacity[0] == capacity[1] > capacity[2]
        assert quality[0] == pytest.approx(quality[1], abs=0.1)
        assert quality[1] < quality[2]

    def test_scanned_page_rate(self, big_host):
        page = text_page(1774, 1288, seed=8)
        stego, stats = hide_document(big_host, page, StegoKey(8), EmbedParams(2.5))
        assert stats.embedding_rate_bpp == pytest.approx(8.716, abs=1e-3)
        assert stats.words <= stats.available_words
        halftone, _ = reveal_document(stego, StegoKey(8), EmbedParams(2.5))
        assert np.array_equal(halftone, to_halftone(page))

    def test_compression(self, big_page):
        prepared = prepare_document(big_page)
        assert 12 * len(prepared.words) <= 0.35 * big_page.size

    def test_extracted_document_quality(self, big_host, big_page):
        key = StegoKey(3)
        p = EmbedParams(2.5)
        stego, _ = hide_document(big_host, big_page, key, p)
        _, gray = reveal_document(stego, key, p)
        assert psnr(big_page, gray) >= 20.0
        assert ssim_global(big_page, gray) >= 0.90
