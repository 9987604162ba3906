"""Solve every renderable scene in a directory and write one SVG per polygon."""

import argparse
from dataclasses import dataclass
from pathlib import Path

from gaussmap import build_polygon, find_fixed_point
from gaussmap.render import can_render, render_svg
from gaussmap.scene import load_scene


@dataclass
class Config:
    scenes: str = str(Path(__file__).resolve().parent.parent / "scenes")
    out: str = "gallery"


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--scenes", default=Config.scenes)
    p.add_argument("--out", default=Config.out)
    a = p.parse_args(argv)
    cfg = Config(scenes=a.scenes, out=a.out)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for path in sorted(Path(cfg.scenes).glob("*.gms")):
        sc = load_scene(path)
        if sc.configuration is None or not can_render(sc.space):
            continue
        rep = find_fixed_point(sc.configuration, sc.space, sc.options.x0)
        if not rep.converged:
            print(f"{path.stem:<24} {rep.status}, skipped")
            continue
        poly = build_polygon(sc.configuration, rep.point)
        svg = render_svg(sc.space, [v.coords for v in poly.vertices],
                         [q.data for q in sc.configuration.points], sc.name)
        target = out / f"{path.stem}.svg"
        target.write_text(svg)
        print(f"{path.stem:<24} {len(poly)} vertices -> {target}")


if __name__ == "__main__":
    main()
