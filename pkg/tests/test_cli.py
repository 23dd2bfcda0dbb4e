import io

import numpy as np
import pandas as pd
import pytest

from src.app import main
from src.codec import pack_bit_file, unpack_bit_file
from src.keywords import ExitCode
from src.netpbm import read_pbm, read_pgm, write_pbm, write_pgm
from src.samples import textured_host
from src.stego import EmbedParams, StegoKey, hide_document, prepare_document


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


class TestExitCodes:
    def test_help(self):
        with pytest.raises(SystemExit) as info:
            main(["--help"])
        assert info.value.code == 0

    def test_subcommand_help(self):
        with pytest.raises(SystemExit) as info:
            main(["embed", "--help"])
        assert info.value.code == 0

    def test_bad_flag(self):
        with pytest.raises(SystemExit) as info:
            main(["embed", "--no-such-flag"])
        assert info.value.code == ExitCode.USAGE

    def test_missing_input(self, tmp_path):
        code, _ = run("halftone", "--input", str(tmp_path / "missing.pgm"), "--out", str(tmp_path / "o.pbm"))
        assert code == ExitCode.USAGE

    def test_unreadable_image(self, tmp_path):
        (tmp_path / "junk.pgm").write_bytes(b"not an image")
        code, _ = run("halftone", "--input", str(tmp_path / "junk.pgm"), "--out", str(tmp_path / "o.pbm"))
        assert code == ExitCode.USAGE

    def test_capacity(self, tmp_path, image_files):
        _, page = image_files
        write_pgm(tmp_path / "tiny.pgm", textured_host(16, 16))
        code, _ = run("embed", "--host", str(tmp_path / "tiny.pgm"), "--doc", str(page), "--key", "1",
                      "--out", str(tmp_path / "s.pgm"))
        assert code == ExitCode.CAPACITY
        assert not (tmp_path / "s.pgm").exists()

    def test_wrong_key(self, tmp_path, image_files):
        host, page = image_files
        stego = tmp_path / "s.pgm"
        assert run("embed", "--host", str(host), "--doc", str(page), "--key", "11", "--out", str(stego))[0] == 0
        code, _ = run("extract", "--stego", str(stego), "--key", "12", "--out-halftone", str(tmp_path / "d.pbm"))
        assert code == ExitCode.CORRUPT


class TestEmbedExtract:
    def test_golden_round_trip(self, tmp_path, image_files, host, page):
        host_file, page_file = image_files
        stego = tmp_path / "s.pgm"
        recovered = tmp_path / "d.pbm"
        golden = tmp_path / "golden.pbm"

        code, out = run("embed", "--host", str(host_file), "--doc", str(page_file), "--key", "0xABCDEF",
                        "--sd-threshold", "2.5", "--min-length", "4", "--out", str(stego))
        assert code == ExitCode.OK
        assert out == ""
        code, _ = run("extract", "--stego", str(stego), "--key", "0xABCDEF", "--sd-threshold", "2.5",
                      "--out-halftone", str(recovered), "--out-gray", str(tmp_path / "d.pgm"))
        assert code == ExitCode.OK

        write_pbm(golden, prepare_document(page, 4).halftone)
        assert recovered.read_bytes() == golden.read_bytes()
        assert read_pgm(tmp_path / "d.pgm").shape == page.shape

        library_stego, _ = hide_document(host, page, StegoKey(0xABCDEF), EmbedParams(2.5), min_length=4)
        assert np.array_equal(read_pgm(stego), library_stego)

    def test_key_from_environment(self, tmp_path, image_files, monkeypatch):
        host_file, page_file = image_files
        monkeypatch.setenv("STEGODOC_KEY", "99")
        stego = tmp_path / "s.pgm"
        assert run("embed", "--host", str(host_file), "--doc", str(page_file), "--out", str(stego))[0] == 0
        assert run("extract", "--stego", str(stego), "--out-halftone", str(tmp_path / "d.pbm"))[0] == 0
        assert run("extract", "--stego", str(stego), "--key", "98")[0] == ExitCode.CORRUPT

    def test_stats_csv(self, tmp_path, image_files):
        host_file, page_file = image_files
        code, out = run("embed", "--host", str(host_file), "--doc", str(page_file), "--key", "5",
                        "--out", str(tmp_path / "s.pgm"), "--stats", "csv")
        assert code == 0
        header, row = out.strip().split("\n")
        assert header.split(",")[:4] == ["host_rows", "host_cols", "doc_rows", "doc_cols"]
        values = dict(zip(header.split(","), row.split(",")))
        assert values["sd_threshold"] == "2.5000"
        assert values["embedding_rate_bpp"] == "0.2500"

    def test_auto_sd_threshold(self, tmp_path, image_files):
        host_file, page_file = image_files
        stego = tmp_path / "s.pgm"
        code, out = run("embed", "--host", str(host_file), "--doc", str(page_file), "--key", "5",
                        "--out", str(stego), "--auto-sd-threshold", "0,2.5,5", "--stats", "csv")
        assert code == 0
        frame = pd.read_csv(io.StringIO(out))
        assert frame["sd_threshold"][0] == 5.0
        assert run("extract", "--stego", str(stego), "--key", "5", "--sd-threshold", "5",
                   "--out-halftone", str(tmp_path / "d.pbm"))[0] == 0

    def test_png_inputs(self, tmp_path, host, page):
        from PIL import Image

        Image.fromarray(host).save(tmp_path / "h.png")
        Image.fromarray(page).save(tmp_path / "p.png")
        args = ["embed", "--host", str(tmp_path / "h.png"), "--doc", str(tmp_path / "p.png"), "--key", "1",
                "--out", str(tmp_path / "s.pgm")]
        assert run(*args)[0] == ExitCode.USAGE
        assert run(*args, "--allow-other-formats")[0] == ExitCode.OK


class TestOtherCommands:
    def test_halftone_and_inverse(self, tmp_path, image_files, page):
        _, page_file = image_files
        assert run("halftone", "--input", str(page_file), "--out", str(tmp_path / "h.pbm"))[0] == 0
        ht = read_pbm(tmp_path / "h.pbm")
        assert ht.shape == page.shape
        assert run("halftone", "--inverse", "--input", str(tmp_path / "h.pbm"), "--out", str(tmp_path / "g.pgm"))[0] == 0
        assert read_pgm(tmp_path / "g.pgm").shape == page.shape

    def test_inspect(self, image_files):
        _, page_file = image_files
        code, out = run("inspect", "--input", str(page_file))
        assert code == 0
        frame = pd.read_csv(io.StringIO(out))
        assert list(frame.columns) == ["kind", "x", "y", "w", "h", "ones_count"]
        assert set(frame["kind"]) == {"leaf", "content", "merged"}
        leaves = frame[frame["kind"] == "leaf"]
        assert (leaves["w"] * leaves["h"]).sum() == 128 * 128
        content = frame[frame["kind"] == "content"]
        assert (content["ones_count"] > 0).all()
        assert content["ones_count"].sum() == leaves["ones_count"].sum()

    def test_inspect_merged_only(self, image_files):
        _, page_file = image_files
        code, out = run("inspect", "--input", str(page_file), "--what", "merged", "--merge-order", "horizontal-first")
        assert code == 0
        assert set(pd.read_csv(io.StringIO(out))["kind"]) == {"merged"}

    def test_metrics(self, tmp_path, host):
        write_pgm(tmp_path / "a.pgm", host)
        noisy = host.copy()
        noisy[5, 5] ^= 1
        write_pgm(tmp_path / "b.pgm", noisy)
        code, out = run("metrics", "--ref", str(tmp_path / "a.pgm"), "--test", str(tmp_path / "b.pgm"))
        assert code == 0
        header, row = out.strip().split("\n")
        assert header == "psnr,ssim"
        psnr_text, ssim_text = row.split(",")
        assert len(psnr_text.split(".")[1]) == 4
        assert ssim_text == "1.0000"

    def test_metrics_identical_and_constant(self, tmp_path):
        write_pgm(tmp_path / "a.pgm", np.full((8, 8), 9, dtype=np.uint8))
        code, out = run("metrics", "--ref", str(tmp_path / "a.pgm"), "--test", str(tmp_path / "a.pgm"))
        assert code == 0
        assert out.strip().split("\n")[1] == "inf,undefined"

    def test_codec(self, tmp_path, rng):
        bits = (rng.random(1000) < 0.05).astype(np.uint8)
        (tmp_path / "raw.bin").write_bytes(pack_bit_file(bits))
        assert run("codec", "encode", "--input", str(tmp_path / "raw.bin"), "--out", str(tmp_path / "enc.bin"))[0] == 0
        encoded = unpack_bit_file((tmp_path / "enc.bin").read_bytes())
        assert len(encoded) % 12 == 0
        assert len(encoded) < len(bits)
        assert run("codec", "decode", "--input", str(tmp_path / "enc.bin"), "--out", str(tmp_path / "dec.bin"))[0] == 0
        assert np.array_equal(unpack_bit_file((tmp_path / "dec.bin").read_bytes()), bits)

    def test_codec_bad_word_stream(self, tmp_path):
        (tmp_path / "bad.bin").write_bytes(pack_bit_file([1] * 13))
        code, _ = run("codec", "decode", "--input", str(tmp_path / "bad.bin"), "--out", str(tmp_path / "o.bin"))
        assert code == ExitCode.USAGE

    def test_bench_to_stdout(self, image_files):
        host_file, page_file = image_files
        code, out = run("bench", "--hosts", str(host_file), "--docs", str(page_file), "--sd-thresholds", "0,5")
        assert code == 0
        frame = pd.read_csv(io.StringIO(out), keep_default_na=False)
        assert len(frame) == 2
        assert [v.lower() for v in frame["roundtrip_ok"].astype(str)] == ["true", "true"]

    def test_log_file(self, tmp_path, image_files):
        _, page_file = image_files
        logs = tmp_path / "logs"
        assert run("halftone", "--input", str(page_file), "--out", str(tmp_path / "h.pbm"),
                   "--log-dir", str(logs), "--log-level", "DEBUG")[0] == 0
        assert any(p.name.startswith("log_") for p in logs.iterdir())
