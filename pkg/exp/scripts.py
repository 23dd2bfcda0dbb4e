import argparse
import sys
from pathlib import Path
from typing import List

IMAGE_DIR = ""
OUTPUT_DIR = ""
SCRIPTS_DIR = ""
ROOT_DIR = Path(__file__).resolve().parent.parent.as_posix()

PRESETS = {
    "thresholds": {"sd": [0.0, 2.5, 5.0], "minLength": [4]},
    "min_length": {"sd": [2.5], "minLength": [4, 8, 16, 32]},
}


class Sweep:
    def __init__(self, name, hosts, docs, sdThresholds, minLengths):
        self.name = name
        self.hosts = hosts
        self.docs = docs
        self.sdThresholds = sdThresholds
        self.minLengths = minLengths

    @classmethod
    def build(cls, name: str, hosts: List[str], docs: List[str]):
        if name not in PRESETS:
            raise Exception(name + " is not a preset")
        assert len(hosts) > 0
        assert len(docs) > 0
        preset = PRESETS[name]
        return cls(name, hosts, docs, preset["sd"], preset["minLength"])

    def generateScript(self):
        scriptFile = Path(SCRIPTS_DIR) / "scripts/{0}.sh".format(self.name)
        if not scriptFile.parent.exists():
            scriptFile.parent.mkdir(parents=True)
        command = "cd " + ROOT_DIR + " && python3 -m src.app bench"
        command += " --hosts " + " ".join(self.hosts)
        command += " --docs " + " ".join(self.docs)
        command += " --sd-thresholds " + ",".join(str(t) for t in self.sdThresholds)
        command += " --min-lengths " + ",".join(str(m) for m in self.minLengths)
        command += " --out " + (Path(OUTPUT_DIR) / (self.name + ".csv")).as_posix()
        command += " --log-dir " + (Path(OUTPUT_DIR) / "log").as_posix()
        command += " 2> " + (Path(OUTPUT_DIR) / (self.name + ".log")).as_posix()
        with scriptFile.open("w") as fp:
            fp.write("#!/bin/bash \n\n")
            fp.write(command + "\n")
        return scriptFile


def writeFixtures(folder: Path, count: int = 3):
    """Synthetic hosts and pages for machines without the test image sets."""
    sys.path.insert(0, ROOT_DIR)
    from src.netpbm import write_pgm
    from src.samples import text_page, textured_host

    folder.mkdir(parents=True, exist_ok=True)
    hosts, docs = [], []
    for seed in range(count):
        host = folder / "host_{}.pgm".format(seed)
        doc = folder / "page_{}.pgm".format(seed)
        write_pgm(host, textured_host(512, 512, seed=seed))
        write_pgm(doc, text_page(256, 256, seed=seed))
        hosts.append(host.as_posix())
        docs.append(doc.as_posix())
    return hosts, docs


def listImages(folder: Path, prefix: str):
    return sorted(p.as_posix() for p in folder.iterdir() if p.name.startswith(prefix) and p.suffix == ".pgm")


def generateScripts(presets: List[str]):
    folder = Path(IMAGE_DIR)
    hosts = listImages(folder, "host")
    docs = listImages(folder, "page")
    if len(hosts) == 0 or len(docs) == 0:
        hosts, docs = writeFixtures(folder)

    for name in presets:
        sweep = Sweep.build(name, hosts, docs)
        sweep.generateScript()

    runScriptFile = Path(SCRIPTS_DIR) / "runAll.sh"
    with runScriptFile.open("w") as fp:
        fp.write("#!/bin/bash \n\n")
        fp.write("for file in {}/scripts/*\n".format(SCRIPTS_DIR))
        fp.write("do\n")
        fp.write(" " * 4 + "chmod a+x $file\n")
        fp.write(" " * 4 + "echo $file\n")
        fp.write(" " * 4 + "$file\n")
        fp.write("done\n\n")
        fp.write("echo 'Done!'")


def checkAndPrehandling(settings):
    global IMAGE_DIR
    global OUTPUT_DIR
    global SCRIPTS_DIR

    curFile = Path(__file__)

    imageDir = Path(settings.imageDir) if settings.imageDir != "" else curFile.parent / "images"
    if imageDir.is_file():
        raise Exception(imageDir.as_posix() + " must be a folder")
    imageDir.mkdir(parents=True, exist_ok=True)
    IMAGE_DIR = imageDir.as_posix()

    output = Path(settings.dir) if settings.dir != "" else curFile.parent / "output"
    if output.is_file():
        raise Exception(output.as_posix() + " must be a folder")
    output.mkdir(parents=True, exist_ok=True)
    OUTPUT_DIR = output.as_posix()

    scriptDir = Path(settings.scriptFolder) if settings.scriptFolder != "" else curFile.parent / "runScripts"
    if scriptDir.is_file():
        raise Exception(scriptDir.as_posix() + " must be a folder")
    scriptDir.mkdir(parents=True, exist_ok=True)
    SCRIPTS_DIR = scriptDir.as_posix()

    presets = [p for p in settings.preset.split(",") if p != ""]
    for p in presets:
        if p not in PRESETS:
            raise Exception(p + " is not a preset, choose from " + ", ".join(PRESETS))
    return presets


if __name__ == "__main__":
    parser = argparse.ArgumentParser()

    parser.add_argument('--imageDir',
                        help='folder with host*.pgm and page*.pgm, synthetic ones are written when empty',
                        type=str, required=False, default="")
    parser.add_argument('--preset',
                        help='comma separated presets: ' + ", ".join(PRESETS),
                        type=str, required=False, default="thresholds,min_length")
    parser.add_argument('--dir',
                        help='output folder of the CSV reports',
                        type=str, required=False, default="")
    parser.add_argument('--scriptFolder',
                        help='the folder of generated scripts',
                        type=str, required=False, default="")

    args = parser.parse_args()
    generateScripts(checkAndPrehandling(args))
