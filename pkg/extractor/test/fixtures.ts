/** Shared test fixtures: a tiny 2-class PPM dataset plus split files. */

import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { encodeP6 } from "../src/ppm";
import { Xoshiro256 } from "../src/rng";

export function tempDir(prefix: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), prefix));
}

/**
 * Eight 6x6 images in two visually distinct classes (dark-red-ish vs
 * bright-blue-ish), written as binary PPM with a labels.txt of
 * "filename label" lines using string labels to exercise remapping.
 */
export function writeToyDataset(dir: string): void {
  fs.mkdirSync(dir, { recursive: true });
  const gen = new Xoshiro256(7n);
  const lines: string[] = [];
  for (let i = 0; i < 8; i++) {
    const cls = i % 2;
    const rgb = new Uint8Array(6 * 6 * 3);
    for (let p = 0; p < 36; p++) {
      const noise = () => Math.floor(gen.nextDouble() * 40);
      rgb[p * 3] = cls === 0 ? 150 + noise() : noise();
      rgb[p * 3 + 1] = noise();
      rgb[p * 3 + 2] = cls === 0 ? noise() : 180 + noise();
    }
    const name = `img-${i}.ppm`;
    fs.writeFileSync(path.join(dir, name), encodeP6(6, 6, rgb));
    lines.push(`${name} ${cls === 0 ? "redish" : "blueish"}`);
  }
  fs.writeFileSync(path.join(dir, "labels.txt"), lines.join("\n") + "\n");
}

/** Rows 0..3 train, 4..5 val, 6..7 test. */
export function writeSplitFiles(dir: string): { train: string; val: string; test: string } {
  const files = {
    train: path.join(dir, "train-idx.txt"),
    val: path.join(dir, "val-idx.txt"),
    test: path.join(dir, "test-idx.txt"),
  };
  fs.writeFileSync(files.train, "0\n1\n2\n3\n");
  fs.writeFileSync(files.val, "4\n5\n");
  fs.writeFileSync(files.test, "6\n7\n");
  return files;
}
