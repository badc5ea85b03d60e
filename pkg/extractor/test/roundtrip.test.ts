/**
 * Cross-boundary acceptance: caches produced here must load in the Python
 * engine with zero validation errors and bit-identical numbers, a
 * corrupted byte must fail on both sides of the boundary, and reported
 * parameter counts must match an independent recount.
 */

import assert from "node:assert/strict";
import { test } from "node:test";
import { execFileSync, spawnSync } from "node:child_process";
import * as fs from "fs";
import * as path from "path";

import { runExtraction } from "../src/extract";
import { verifyCache } from "../src/verify";
import { tempDir, writeSplitFiles, writeToyDataset } from "./fixtures";

const PYTHON = process.env.PYTHON ?? "python3";
const ORACLE = path.join(__dirname, "..", "..", "test", "param_count_oracle.py");
const CLI = path.join(__dirname, "..", "src", "cli.js");

function python(code: string, ok = true): string {
  const result = spawnSync(PYTHON, ["-c", code], { encoding: "utf-8" });
  if (ok && result.status !== 0) {
    throw new Error(`python failed:\n${result.stderr}`);
  }
  if (!ok && result.status === 0) {
    throw new Error("python unexpectedly succeeded");
  }
  return (result.stdout + result.stderr).trim();
}

function extractAll() {
  const root = tempDir("roundtrip-");
  const dataDir = path.join(root, "data");
  writeToyDataset(dataDir);
  const splits = writeSplitFiles(root);
  const outDir = path.join(root, "out");
  const summary = runExtraction(
    {
      modelPatterns: ["*"],
      dataDir,
      splitFiles: splits,
      outDir,
      batchSize: 4,
      device: "cpu",
    },
    () => {}
  );
  return { root, outDir, summary };
}

test("engine loads every produced cache with zero validation errors", () => {
  const { summary } = extractAll();
  const out = python(
    `
import json
from backpick import load_feature_cache, load_registry
registry = load_registry(${JSON.stringify(summary.registryPath)})
report = []
for directory in ${JSON.stringify(summary.cacheDirs)}:
    cache = load_feature_cache(directory, registry)
    report.append([cache.backbone_id, cache.feature_dim, cache.class_count,
                   int(cache.splits["train"].labels.shape[0])])
print(json.dumps(report))
`
  );
  const report = JSON.parse(out);
  assert.equal(report.length, summary.cacheDirs.length);
  for (const [backboneId, featureDim, classCount, trainRows] of report) {
    assert.ok(summary.models.includes(backboneId));
    assert.ok(featureDim >= 1);
    assert.equal(classCount, 2);
    assert.equal(trainRows, 4);
  }
});

test("a probe row survives write-then-engine-read bit for bit", () => {
  const { summary } = extractAll();
  const cacheDir = summary.cacheDirs[0];
  // Bit pattern of row 0 as this side wrote it.
  const bytes = fs.readFileSync(path.join(cacheDir, "train.features.bin"));
  const meta = JSON.parse(fs.readFileSync(path.join(cacheDir, "meta.json"), "utf-8"));
  const rowHex = bytes.subarray(0, meta.feature_dim * 4).toString("hex");
  // Bit pattern of the same row after the engine materialized it.
  const engineHex = python(
    `
from backpick import load_feature_cache
cache = load_feature_cache(${JSON.stringify(cacheDir)})
print(cache.splits["train"].features[0].tobytes().hex())
`
  );
  assert.equal(engineHex, rowHex);
});

test("a corrupted byte fails on both sides of the boundary", () => {
  const { summary } = extractAll();
  const cacheDir = summary.cacheDirs[0];
  const labPath = path.join(cacheDir, "train.labels.bin");
  const bytes = fs.readFileSync(labPath);
  bytes.writeInt32LE(2, 0); // class_count is 2
  fs.writeFileSync(labPath, bytes);

  const report = verifyCache(cacheDir);
  assert.equal(report.ok, false);

  const engineError = python(
    `
from backpick import load_feature_cache
from backpick.core import DataError
try:
    load_feature_cache(${JSON.stringify(cacheDir)})
    print("LOADED")
except DataError as exc:
    print(f"REJECTED: {exc}")
`
  );
  assert.match(engineError, /^REJECTED:/);
});

test("reported param counts match the independent recount for all models", () => {
  const describeJson = execFileSync(process.execPath, [CLI, "describe", "--models", "*"], {
    encoding: "utf-8",
  });
  const models = JSON.parse(describeJson);
  assert.ok(models.length >= 3); // parity must cover at least three models
  const result = spawnSync(PYTHON, [ORACLE], { input: describeJson, encoding: "utf-8" });
  assert.equal(result.status, 0, `oracle reported mismatches:\n${result.stdout}`);
  for (const line of result.stdout.trim().split("\n")) {
    assert.match(line, /^ok /);
  }
});

test("extracted registry drives an end-to-end engine search", () => {
  const { outDir, summary } = extractAll();
  const outcome = python(
    `
import json
from backpick import load_registry
from backpick.search import live_backend, exhaustive_search
registry = load_registry(${JSON.stringify(summary.registryPath)})
backend = live_backend(cache_root=${JSON.stringify(path.join(outDir, "caches"))}, registry=registry)
result = exhaustive_search(registry, backend, "nearest_centroid")
print(json.dumps({"selected": result.selected, "k": result.k}))
`
  );
  const parsed = JSON.parse(outcome);
  assert.equal(parsed.k, summary.models.length);
  assert.ok(summary.models.includes(parsed.selected));
});
