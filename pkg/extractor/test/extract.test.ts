import assert from "node:assert/strict";
import { test } from "node:test";
import * as fs from "fs";
import * as path from "path";

import { runExtraction } from "../src/extract";
import { verifyCache } from "../src/verify";
import { tempDir, writeSplitFiles, writeToyDataset } from "./fixtures";

function runToyJob(models: string[] = ["micro_mlp_16.web400m"]) {
  const root = tempDir("extract-");
  const dataDir = path.join(root, "data");
  writeToyDataset(dataDir);
  const splits = writeSplitFiles(root);
  const outDir = path.join(root, "out");
  const warnings: string[] = [];
  const summary = runExtraction(
    {
      modelPatterns: models,
      dataDir,
      splitFiles: splits,
      outDir,
      batchSize: 3,
      device: "cpu",
    },
    (line) => warnings.push(line)
  );
  return { root, dataDir, splits, outDir, summary, warnings };
}

test("toy dataset through one small backbone produces a well-formed cache", () => {
  const { outDir, summary } = runToyJob();
  assert.deepEqual(summary.models, ["micro_mlp_16.web400m"]);
  assert.equal(summary.imageCount, 8);

  const cacheDir = summary.cacheDirs[0];
  const meta = JSON.parse(fs.readFileSync(path.join(cacheDir, "meta.json"), "utf-8"));
  assert.equal(meta.backbone_id, "micro_mlp_16.web400m");
  assert.equal(meta.feature_dim, 24);
  assert.equal(meta.class_count, 2);
  assert.deepEqual(meta.splits, { train: 4, val: 2, test: 2 });
  assert.deepEqual(meta.label_names, ["blueish", "redish"]); // lexicographic remap
  assert.ok(meta.timing.extract_seconds >= 0);

  const trainBytes = fs.readFileSync(path.join(cacheDir, "train.features.bin"));
  assert.equal(trainBytes.length, 4 * 24 * 4);
  const labels = fs.readFileSync(path.join(cacheDir, "train.labels.bin"));
  // labels.txt alternates redish/blueish; redish remaps to class 1.
  assert.deepEqual(
    [0, 1, 2, 3].map((i) => labels.readInt32LE(i * 4)),
    [1, 0, 1, 0]
  );

  const registry = fs.readFileSync(summary.registryPath, "utf-8").trim().split("\n");
  assert.equal(registry.length, 1);
  const line = JSON.parse(registry[0]);
  assert.equal(line.id, "micro_mlp_16.web400m");
  assert.equal(line.param_count, 64 * 16 + 16 + 16 * 24 + 24);
  assert.equal(line.pretrain_dataset, "web-crawl");
  assert.equal(line.feature_dim, 24);

  const timing = JSON.parse(fs.readFileSync(summary.timingPath, "utf-8").trim());
  assert.equal(timing.model, "micro_mlp_16.web400m");
  assert.ok(timing.download_seconds >= 0 && timing.extract_seconds >= 0);
});

test("rerunning the same job writes identical feature bytes", () => {
  const first = runToyJob();
  const second = runToyJob();
  for (const split of ["train", "val", "test"]) {
    const a = fs.readFileSync(path.join(first.summary.cacheDirs[0], `${split}.features.bin`));
    const b = fs.readFileSync(path.join(second.summary.cacheDirs[0], `${split}.features.bin`));
    assert.ok(a.equals(b), `${split} bytes differ between reruns`);
  }
});

test("undecodable image is skipped with a warning and logged", () => {
  const root = tempDir("extract-skip-");
  const dataDir = path.join(root, "data");
  writeToyDataset(dataDir);
  fs.writeFileSync(path.join(dataDir, "img-5.ppm"), "JPEG nope");
  const splits = writeSplitFiles(root);
  const warnings: string[] = [];
  const summary = runExtraction(
    {
      modelPatterns: ["micro_conv_8.photos1m"],
      dataDir,
      splitFiles: splits,
      outDir: path.join(root, "out"),
      batchSize: 8,
      device: "cpu",
    },
    (line) => warnings.push(line)
  );
  assert.deepEqual(summary.skipped, ["img-5.ppm"]);
  assert.ok(warnings.some((w) => w.includes("img-5.ppm")));
  const meta = JSON.parse(
    fs.readFileSync(path.join(summary.cacheDirs[0], "meta.json"), "utf-8")
  );
  assert.deepEqual(meta.splits, { train: 4, val: 1, test: 2 }); // row 5 was in val
});

test("overlapping splits are rejected", () => {
  const root = tempDir("extract-overlap-");
  const dataDir = path.join(root, "data");
  writeToyDataset(dataDir);
  const splits = writeSplitFiles(root);
  fs.writeFileSync(splits.val, "3\n4\n"); // row 3 already in train
  assert.throws(
    () =>
      runExtraction(
        {
          modelPatterns: ["micro_mlp_16.web400m"],
          dataDir,
          splitFiles: splits,
          outDir: path.join(root, "out"),
          batchSize: 4,
          device: "cpu",
        },
        () => {}
      ),
    /splits overlap: dataset row 3/
  );
});

test("only cpu extraction is supported", () => {
  const root = tempDir("extract-device-");
  const dataDir = path.join(root, "data");
  writeToyDataset(dataDir);
  const splits = writeSplitFiles(root);
  assert.throws(
    () =>
      runExtraction(
        {
          modelPatterns: ["*"],
          dataDir,
          splitFiles: splits,
          outDir: path.join(root, "out"),
          batchSize: 4,
          device: "cuda:0",
        },
        () => {}
      ),
    /unsupported device/
  );
});

test("freshly produced cache verifies clean", () => {
  const { summary } = runToyJob(["micro_patch_4.scans50k"]);
  const report = verifyCache(summary.cacheDirs[0]);
  assert.deepEqual(report, { ok: true, violations: [] });
});

test("truncating features.bin fails verification with a length mismatch", () => {
  const { summary } = runToyJob();
  const cacheDir = summary.cacheDirs[0];
  const featPath = path.join(cacheDir, "val.features.bin");
  const bytes = fs.readFileSync(featPath);
  fs.writeFileSync(featPath, bytes.subarray(0, bytes.length - 4));
  const report = verifyCache(cacheDir);
  assert.equal(report.ok, false);
  const violation = report.violations.find((v) => v.field === "val.features.bin length");
  assert.ok(violation);
  assert.match(violation!.expected, /192 bytes/); // 2 rows x 24 dims x 4 bytes
  assert.match(violation!.actual, /188 bytes/);
});

test("label outside the class range fails verification", () => {
  const { summary } = runToyJob();
  const cacheDir = summary.cacheDirs[0];
  const labPath = path.join(cacheDir, "test.labels.bin");
  const bytes = fs.readFileSync(labPath);
  bytes.writeInt32LE(2, 0); // class_count is 2, so 2 is out of range
  fs.writeFileSync(labPath, bytes);
  const report = verifyCache(cacheDir);
  assert.equal(report.ok, false);
  const violation = report.violations.find((v) => v.field === "test.labels[0]");
  assert.ok(violation);
  assert.equal(violation!.expected, "in [0, 1]");
  assert.equal(violation!.actual, "2");
});

test("class missing from train fails verification", () => {
  const { summary } = runToyJob();
  const cacheDir = summary.cacheDirs[0];
  const labPath = path.join(cacheDir, "train.labels.bin");
  const bytes = fs.readFileSync(labPath);
  for (let i = 0; i < 4; i++) bytes.writeInt32LE(0, i * 4);
  fs.writeFileSync(labPath, bytes);
  const report = verifyCache(cacheDir);
  assert.equal(report.ok, false);
  assert.ok(report.violations.some((v) => v.field === "train coverage"));
});
