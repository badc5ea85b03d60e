/**
 * Writers for the engine's on-disk formats.
 *
 * Feature cache directory: meta.json plus {split}.features.bin (row-major
 * little-endian float32) and {split}.labels.bin (little-endian int32) for
 * train/val/test.  Registry lines are JSON objects.  All writes go through
 * a temp file and an atomic rename.
 */

import * as fs from "fs";
import * as path from "path";

export interface SplitArrays {
  features: Float32Array; // n * featureDim, row-major
  labels: Int32Array;
}

export interface CacheData {
  backboneId: string;
  featureDim: number;
  classCount: number;
  /** original label names in remapped order: labelNames[i] is class i */
  labelNames: string[];
  splits: { train: SplitArrays; val: SplitArrays; test: SplitArrays };
  downloadSeconds: number;
  extractSeconds: number;
}

export interface RegistryLine {
  id: string;
  param_count: number;
  pretrain_dataset: string;
  pretrain_dataset_size: number;
  feature_dim: number;
  source: string;
}

export function atomicWrite(target: string, data: Buffer | string): void {
  const tmp = target + ".tmp-" + process.pid;
  fs.writeFileSync(tmp, data);
  fs.renameSync(tmp, target);
}

function toLittleEndianFloat32(values: Float32Array): Buffer {
  const buf = Buffer.alloc(values.length * 4);
  for (let i = 0; i < values.length; i++) buf.writeFloatLE(values[i], i * 4);
  return buf;
}

function toLittleEndianInt32(values: Int32Array): Buffer {
  const buf = Buffer.alloc(values.length * 4);
  for (let i = 0; i < values.length; i++) buf.writeInt32LE(values[i], i * 4);
  return buf;
}

export function writeCache(cache: CacheData, directory: string): void {
  fs.mkdirSync(directory, { recursive: true });
  const counts: Record<string, number> = {};
  for (const split of ["train", "val", "test"] as const) {
    const arrays = cache.splits[split];
    if (arrays.features.length !== arrays.labels.length * cache.featureDim) {
      throw new Error(
        `${split}: ${arrays.features.length} feature values do not form ` +
          `${arrays.labels.length} rows of width ${cache.featureDim}`
      );
    }
    for (const v of arrays.features) {
      if (!Number.isFinite(v)) throw new Error(`${split}: non-finite feature value`);
    }
    counts[split] = arrays.labels.length;
    atomicWrite(path.join(directory, `${split}.features.bin`), toLittleEndianFloat32(arrays.features));
    atomicWrite(path.join(directory, `${split}.labels.bin`), toLittleEndianInt32(arrays.labels));
  }
  const meta = {
    backbone_id: cache.backboneId,
    feature_dim: cache.featureDim,
    class_count: cache.classCount,
    splits: counts,
    timing: {
      download_seconds: cache.downloadSeconds,
      extract_seconds: cache.extractSeconds,
    },
    label_names: cache.labelNames,
  };
  atomicWrite(path.join(directory, "meta.json"), JSON.stringify(meta, null, 2) + "\n");
}

export function registryLine(line: RegistryLine): string {
  return JSON.stringify(line);
}
