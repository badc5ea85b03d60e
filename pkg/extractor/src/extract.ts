/**
 * Runs an extraction job: resolve zoo models, decode the image dataset,
 * split it by index files, push every image through each backbone, and
 * write the engine's inputs (feature caches, registry lines, timing log).
 *
 * Labels are remapped to consecutive integers 0..C-1 (sorted numerically
 * when every label parses as an integer, lexicographically otherwise);
 * the original names are recorded in the cache metadata in class order.
 * Images that fail to decode are skipped with a warning and logged.
 */

import * as fs from "fs";
import * as path from "path";

import { CacheData, SplitArrays, atomicWrite, registryLine, writeCache } from "./cache";
import { Image, decodeNetpbm, resize } from "./ppm";
import {
  Model,
  ModelSpec,
  loadModel,
  parseOverrides,
  probeFeatureDim,
  resolveModels,
  tagMetadata,
} from "./zoo";

export interface ExtractionJob {
  modelPatterns: string[];
  dataDir: string;
  /** index files into the label-file row order */
  splitFiles: { train: string; val: string; test: string };
  outDir: string;
  batchSize: number;
  device: string;
  overridesCsv?: string;
}

export interface ExtractionSummary {
  models: string[];
  imageCount: number;
  skipped: string[];
  cacheDirs: string[];
  registryPath: string;
  timingPath: string;
}

interface Row {
  filename: string;
  label: string;
}

function readLabelFile(dataDir: string): Row[] {
  const labelPath = path.join(dataDir, "labels.txt");
  if (!fs.existsSync(labelPath)) {
    throw new Error(`label file not found: ${labelPath}`);
  }
  const rows: Row[] = [];
  const lines = fs.readFileSync(labelPath, "utf-8").split("\n");
  for (const [index, raw] of lines.entries()) {
    const line = raw.trim();
    if (!line) continue;
    const match = line.match(/^(\S+)\s+(\S+)$/);
    if (!match) {
      throw new Error(`${labelPath}:${index + 1}: expected "filename label", got ${JSON.stringify(line)}`);
    }
    rows.push({ filename: match[1], label: match[2] });
  }
  if (rows.length === 0) throw new Error(`${labelPath}: no labeled images`);
  return rows;
}

function readIndexFile(file: string, rowCount: number): number[] {
  if (!fs.existsSync(file)) throw new Error(`split index file not found: ${file}`);
  const indices: number[] = [];
  for (const [lineno, raw] of fs.readFileSync(file, "utf-8").split("\n").entries()) {
    const line = raw.trim();
    if (!line) continue;
    const value = Number(line);
    if (!Number.isInteger(value) || value < 0 || value >= rowCount) {
      throw new Error(`${file}:${lineno + 1}: index ${line} outside [0, ${rowCount - 1}]`);
    }
    indices.push(value);
  }
  if (indices.length === 0) throw new Error(`${file}: empty split`);
  return indices;
}

function remapLabels(rows: Row[], used: number[]): { classCount: number; names: string[]; classOf: Map<string, number> } {
  const distinct = [...new Set(used.map((i) => rows[i].label))];
  const allNumeric = distinct.every((label) => /^-?\d+$/.test(label));
  distinct.sort(allNumeric ? (a, b) => Number(a) - Number(b) : undefined);
  const classOf = new Map(distinct.map((label, cls) => [label, cls]));
  return { classCount: distinct.length, names: distinct, classOf };
}

export function runExtraction(job: ExtractionJob, log: (line: string) => void = console.error): ExtractionSummary {
  if (job.device !== "cpu") {
    throw new Error(`unsupported device ${JSON.stringify(job.device)}; this zoo runs on cpu only`);
  }
  if (!Number.isInteger(job.batchSize) || job.batchSize < 1) {
    throw new Error("batch size must be a positive integer");
  }
  const overrides = job.overridesCsv
    ? parseOverrides(fs.readFileSync(job.overridesCsv, "utf-8"))
    : {};
  const specs = resolveModels(job.modelPatterns);

  const rows = readLabelFile(job.dataDir);
  const splitIndices = {
    train: readIndexFile(job.splitFiles.train, rows.length),
    val: readIndexFile(job.splitFiles.val, rows.length),
    test: readIndexFile(job.splitFiles.test, rows.length),
  };
  const seen = new Set<number>();
  for (const split of ["train", "val", "test"] as const) {
    for (const index of splitIndices[split]) {
      if (seen.has(index)) {
        throw new Error(`splits overlap: dataset row ${index} appears twice`);
      }
      seen.add(index);
    }
  }

  // Decode each referenced image once; failures drop the row everywhere.
  const skipped: string[] = [];
  const decoded = new Map<number, Image>();
  for (const index of seen) {
    const file = path.join(job.dataDir, rows[index].filename);
    try {
      decoded.set(index, decodeNetpbm(fs.readFileSync(file), rows[index].filename));
    } catch (err) {
      skipped.push(rows[index].filename);
      log(`warning: skipping ${rows[index].filename}: ${(err as Error).message}`);
    }
  }
  const usable = (indices: number[]) => indices.filter((i) => decoded.has(i));
  const kept = {
    train: usable(splitIndices.train),
    val: usable(splitIndices.val),
    test: usable(splitIndices.test),
  };
  const usedRows = [...kept.train, ...kept.val, ...kept.test];
  if (usedRows.length === 0) throw new Error("no usable images after decoding");
  const { classCount, names, classOf } = remapLabels(rows, usedRows);

  fs.mkdirSync(job.outDir, { recursive: true });
  const cacheDirs: string[] = [];
  const registryLines: string[] = [];
  const timingLines: string[] = [];

  for (const spec of specs) {
    const acquireStart = process.hrtime.bigint();
    const model = loadModel(spec);
    const downloadSeconds = Number(process.hrtime.bigint() - acquireStart) / 1e9;

    const extractStart = process.hrtime.bigint();
    const featureDim = probeFeatureDim(model);
    const splits = {} as CacheData["splits"];
    for (const split of ["train", "val", "test"] as const) {
      splits[split] = extractSplit(model, rows, kept[split], decoded, classOf, featureDim, job.batchSize);
    }
    const extractSeconds = Number(process.hrtime.bigint() - extractStart) / 1e9;

    const cacheDir = path.join(job.outDir, "caches", spec.id);
    writeCache(
      {
        backboneId: spec.id,
        featureDim,
        classCount,
        labelNames: names,
        splits,
        downloadSeconds,
        extractSeconds,
      },
      cacheDir
    );
    cacheDirs.push(cacheDir);

    const meta = tagMetadata(spec.tag, overrides);
    registryLines.push(
      registryLine({
        id: spec.id,
        param_count: model.paramCount,
        pretrain_dataset: meta.dataset,
        pretrain_dataset_size: meta.size,
        feature_dim: featureDim,
        source: `backpick-extractor/${spec.family}`,
      })
    );
    timingLines.push(
      JSON.stringify({ model: spec.id, download_seconds: downloadSeconds, extract_seconds: extractSeconds })
    );
    log(`extracted ${spec.id}: ${featureDim}-d features, ${model.paramCount} params`);
  }

  const registryPath = path.join(job.outDir, "registry.jsonl");
  const timingPath = path.join(job.outDir, "timing.jsonl");
  atomicWrite(registryPath, registryLines.join("\n") + "\n");
  atomicWrite(timingPath, timingLines.join("\n") + "\n");
  return {
    models: specs.map((s) => s.id),
    imageCount: decoded.size,
    skipped,
    cacheDirs,
    registryPath,
    timingPath,
  };
}

function extractSplit(
  model: Model,
  rows: Row[],
  indices: number[],
  decoded: Map<number, Image>,
  classOf: Map<string, number>,
  featureDim: number,
  batchSize: number
): SplitArrays {
  const features = new Float32Array(indices.length * featureDim);
  const labels = new Int32Array(indices.length);
  for (let start = 0; start < indices.length; start += batchSize) {
    const batchIndices = indices.slice(start, start + batchSize);
    const batch = batchIndices.map((i) => resize(decoded.get(i)!, model.spec.inputSize));
    const outputs = model.forward(batch, model.spec.inputSize);
    outputs.forEach((vector, offset) => {
      if (vector.length !== featureDim) {
        throw new Error(`${model.spec.id}: probe said ${featureDim}-d but forward produced ${vector.length}-d`);
      }
      features.set(Float32Array.from(vector), (start + offset) * featureDim);
      labels[start + offset] = classOf.get(rows[batchIndices[offset]].label)!;
    });
  }
  return { features, labels };
}
