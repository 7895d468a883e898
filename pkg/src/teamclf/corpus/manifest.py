"""Game manifest: one JSON index per game directory.

Schema (teamclf.manifest/1)::

    {
      "format": "teamclf.manifest/1",
      "game_id": "game_000",
      "annotation_stride": 1,
      "homography": "homography.txt",        # optional, relative to the dir
      "frames": [
        {"frame": 0,
         "crops": [
           {"image": "crops/f00000_d00.png",
            "mask":  "crops/f00000_d00_mask.png",
            "bbox":  [x0, y0, x1, y1],
            "label": "TeamA" | "TeamB" | "Referee" | "FalsePositive" | null,
            "rink":  [x, y] | null}          # ground-truth rink position
         ]}
      ]
    }

Labels may appear only on frames whose index is a multiple of the
annotation stride.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from ..geometry import Homography, load_homography
from ..labels import ALL_LABELS
from ..preprocess import PlayerCrop

FORMAT_TAG = "teamclf.manifest/1"
MANIFEST_NAME = "game.json"


@dataclass
class CropRecord:
    image_path: str
    mask_path: str
    bbox: tuple
    label: str | None = None
    rink: tuple | None = None  # ground-truth rink position, synthetic corpora only


@dataclass
class FrameRecord:
    frame_index: int
    crops: list = field(default_factory=list)

    @property
    def annotated(self) -> bool:
        return any(c.label is not None for c in self.crops)


@dataclass
class GameManifest:
    game_id: str
    root: Path
    frames: list = field(default_factory=list)
    annotation_stride: int = 10
    homography_path: str | None = None

    def frame(self, index: int) -> FrameRecord:
        for fr in self.frames:
            if fr.frame_index == index:
                return fr
        raise KeyError(f"game {self.game_id} has no frame {index}")

    def annotated_frame_indices(self) -> list[int]:
        return [fr.frame_index for fr in self.frames if fr.annotated]

    def load_player_crop(self, record: CropRecord, frame_index: int) -> PlayerCrop:
        img_path = self.root / record.image_path
        bgr = cv2.imread(str(img_path), cv2.IMREAD_COLOR)
        if bgr is None:
            raise FileNotFoundError(f"missing crop image {img_path}")
        mask = cv2.imread(str(self.root / record.mask_path), cv2.IMREAD_GRAYSCALE)
        if mask is None:
            raise FileNotFoundError(f"missing mask {self.root / record.mask_path}")
        return PlayerCrop(
            pixels=np.ascontiguousarray(bgr[:, :, ::-1]),
            mask=mask > 127,
            game_id=self.game_id,
            frame_index=frame_index,
            bbox=tuple(record.bbox),
            label=record.label,
        )

    def load_homography(self) -> Homography:
        if self.homography_path is None:
            raise ValueError(f"game {self.game_id} has no homography file")
        return load_homography(self.root / self.homography_path)


def save_manifest(manifest: GameManifest, path: Path | None = None) -> Path:
    """Write the JSON index; returns its path."""
    path = Path(path) if path is not None else manifest.root / MANIFEST_NAME
    doc = {
        "format": FORMAT_TAG,
        "game_id": manifest.game_id,
        "annotation_stride": manifest.annotation_stride,
        "homography": manifest.homography_path,
        "frames": [
            {
                "frame": fr.frame_index,
                "crops": [
                    {
                        "image": c.image_path,
                        "mask": c.mask_path,
                        "bbox": list(c.bbox),
                        "label": c.label,
                        "rink": list(c.rink) if c.rink is not None else None,
                    }
                    for c in fr.crops
                ],
            }
            for fr in manifest.frames
        ],
    }
    path.write_text(json.dumps(doc, indent=1))
    return path


def load_manifest(path, check_files: bool = True) -> GameManifest:
    """Load and validate a game manifest.

    ``path`` may be the JSON file or the game directory. Raises ValueError
    on schema violations (unknown labels, annotations off the stride grid)
    and FileNotFoundError for missing crop files when ``check_files``.
    """
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    doc = json.loads(path.read_text())
    if doc.get("format") != FORMAT_TAG:
        raise ValueError(f"{path}: unsupported manifest format {doc.get('format')!r}")
    stride = int(doc.get("annotation_stride", 10))
    if stride < 1:
        raise ValueError(f"{path}: annotation_stride must be >= 1")
    manifest = GameManifest(
        game_id=doc["game_id"],
        root=path.parent,
        annotation_stride=stride,
        homography_path=doc.get("homography"),
    )
    seen = set()
    for fdoc in doc["frames"]:
        idx = int(fdoc["frame"])
        if idx in seen:
            raise ValueError(f"{path}: duplicate frame index {idx}")
        seen.add(idx)
        fr = FrameRecord(frame_index=idx)
        for cdoc in fdoc.get("crops", []):
            label = cdoc.get("label")
            if label is not None:
                if label not in ALL_LABELS:
                    raise ValueError(f"{path}: unknown label {label!r} in frame {idx}")
                if idx % stride != 0:
                    raise ValueError(
                        f"{path}: frame {idx} is annotated but not on the "
                        f"stride-{stride} grid"
                    )
            rink = cdoc.get("rink")
            fr.crops.append(
                CropRecord(
                    image_path=cdoc["image"],
                    mask_path=cdoc["mask"],
                    bbox=tuple(cdoc["bbox"]),
                    label=label,
                    rink=tuple(rink) if rink is not None else None,
                )
            )
            if check_files:
                for rel in (cdoc["image"], cdoc["mask"]):
                    if not (manifest.root / rel).is_file():
                        raise FileNotFoundError(
                            f"{path}: referenced file {rel} does not exist"
                        )
        manifest.frames.append(fr)
    manifest.frames.sort(key=lambda fr: fr.frame_index)
    return manifest


def discover_games(corpus_dir) -> list[GameManifest]:
    """Load every game manifest found directly under a corpus directory."""
    corpus_dir = Path(corpus_dir)
    manifests = []
    for sub in sorted(corpus_dir.iterdir()):
        if sub.is_dir() and (sub / MANIFEST_NAME).is_file():
            manifests.append(load_manifest(sub))
    if not manifests:
        raise FileNotFoundError(f"no game manifests found under {corpus_dir}")
    return manifests
