/**
 * Producer-side revalidation of a written cache directory: the same
 * invariants the engine enforces on load, checked from this side of the
 * language boundary so a broken write is caught before anything consumes
 * it.  Every violation reports the field with expected and actual values.
 */

import * as fs from "fs";
import * as path from "path";

export interface Violation {
  field: string;
  expected: string;
  actual: string;
}

export interface VerifyReport {
  ok: boolean;
  violations: Violation[];
}

const SPLITS = ["train", "val", "test"] as const;

export function verifyCache(directory: string): VerifyReport {
  const violations: Violation[] = [];
  const fail = (field: string, expected: string, actual: string) =>
    violations.push({ field, expected, actual });

  const metaPath = path.join(directory, "meta.json");
  if (!fs.existsSync(metaPath)) {
    fail("meta.json", "file present", "missing");
    return { ok: false, violations };
  }
  let meta: any;
  try {
    meta = JSON.parse(fs.readFileSync(metaPath, "utf-8"));
  } catch (err) {
    fail("meta.json", "valid JSON", String(err));
    return { ok: false, violations };
  }

  if (typeof meta.backbone_id !== "string" || !meta.backbone_id) {
    fail("backbone_id", "non-empty string", JSON.stringify(meta.backbone_id));
  }
  const featureDim = meta.feature_dim;
  if (!Number.isInteger(featureDim) || featureDim < 1) {
    fail("feature_dim", "integer >= 1", JSON.stringify(featureDim));
  }
  const classCount = meta.class_count;
  if (!Number.isInteger(classCount) || classCount < 1) {
    fail("class_count", "integer >= 1", JSON.stringify(classCount));
  }
  const splitsMeta = meta.splits ?? {};
  const declared = Object.keys(splitsMeta).sort().join(",");
  if (declared !== "test,train,val") {
    fail("splits", "exactly train,val,test", declared || "(none)");
  }
  if (violations.length > 0) return { ok: false, violations };

  for (const split of SPLITS) {
    const n = splitsMeta[split];
    if (!Number.isInteger(n) || n < 1) {
      fail(`splits.${split}`, "integer >= 1", JSON.stringify(n));
      continue;
    }
    const featPath = path.join(directory, `${split}.features.bin`);
    const labPath = path.join(directory, `${split}.labels.bin`);
    if (!fs.existsSync(featPath) || !fs.existsSync(labPath)) {
      fail(`${split} files`, "features.bin and labels.bin present", "missing");
      continue;
    }
    const featBytes = fs.readFileSync(featPath);
    const expectedFeat = n * featureDim * 4;
    if (featBytes.length !== expectedFeat) {
      fail(`${split}.features.bin length`, `${expectedFeat} bytes`, `${featBytes.length} bytes`);
      continue;
    }
    const labBytes = fs.readFileSync(labPath);
    if (labBytes.length !== n * 4) {
      fail(`${split}.labels.bin length`, `${n * 4} bytes`, `${labBytes.length} bytes`);
      continue;
    }
    for (let i = 0; i < n * featureDim; i++) {
      const v = featBytes.readFloatLE(i * 4);
      if (!Number.isFinite(v)) {
        fail(`${split}.features[${i}]`, "finite float32", String(v));
        break;
      }
    }
    const seen = new Set<number>();
    for (let i = 0; i < n; i++) {
      const label = labBytes.readInt32LE(i * 4);
      if (label < 0 || label >= classCount) {
        fail(`${split}.labels[${i}]`, `in [0, ${classCount - 1}]`, String(label));
        break;
      }
      seen.add(label);
    }
    if (split === "train") {
      for (let cls = 0; cls < classCount; cls++) {
        if (!seen.has(cls)) fail("train coverage", `class ${cls} present`, "absent");
      }
    }
  }
  return { ok: violations.length === 0, violations };
}

export function formatReport(report: VerifyReport): string {
  if (report.ok) return "ok: all cache invariants hold\n";
  return (
    report.violations
      .map((v) => `fail: ${v.field}: expected ${v.expected}, got ${v.actual}`)
      .join("\n") + "\n"
  );
}
