import assert from "node:assert/strict";
import { test } from "node:test";

import { Xoshiro256, fnv1a64 } from "../src/rng";
import {
  ZOO,
  loadModel,
  parseOverrides,
  probeFeatureDim,
  resolveModels,
  tagMetadata,
  tensorSpecs,
} from "../src/zoo";

test("generator matches the published splitmix64 and xoshiro steps", () => {
  // First splitmix64 output for seed 0 is a published vector; a hand-set
  // xoshiro state [1,2,3,4] must emit rotl(2*5,7)*9 = 11520 then 0.
  const gen = new Xoshiro256(0n);
  assert.equal((gen as any).s[0], 0xe220a8397b1dcdafn);
  (gen as any).s = [1n, 2n, 3n, 4n];
  assert.equal(gen.nextU64(), 11520n);
  assert.equal(gen.nextU64(), 0n);
  assert.equal(fnv1a64(""), 0xcbf29ce484222325n);
  assert.equal(fnv1a64("a"), 0xaf63dc4c8601ec8cn);
});

test("patterns resolve with wildcards and reject unknown names", () => {
  assert.equal(resolveModels(["*"]).length, ZOO.length);
  const convs = resolveModels(["micro_conv_*"]);
  assert.deepEqual(
    convs.map((m) => m.id),
    ["micro_conv_8.photos1m", "micro_conv_12.web400m"]
  );
  assert.throws(() => resolveModels(["resnet50*"]), /no zoo model matches/);
});

test("same model name always materializes identical weights", () => {
  const a = loadModel(ZOO[0]);
  const b = loadModel(ZOO[0]);
  assert.equal(a.paramCount, b.paramCount);
  for (let t = 0; t < a.tensors.length; t++) {
    assert.deepEqual(Array.from(a.tensors[t].values), Array.from(b.tensors[t].values));
  }
});

test("param count equals the sum of declared tensor sizes", () => {
  for (const spec of ZOO) {
    const model = loadModel(spec);
    const expected = tensorSpecs(spec)
      .map((t) => t.shape.reduce((x, y) => x * y, 1))
      .reduce((x, y) => x + y, 0);
    assert.equal(model.paramCount, expected);
  }
});

test("probed feature width matches the declared one", () => {
  for (const spec of ZOO) {
    assert.equal(probeFeatureDim(loadModel(spec)), spec.featureDim);
  }
});

test("tag metadata falls back to unknown/0 and respects overrides", () => {
  assert.deepEqual(tagMetadata("web400m"), { dataset: "web-crawl", size: 400_000_000 });
  assert.deepEqual(tagMetadata("fieldcam"), { dataset: "unknown", size: 0 });
  const overrides = parseOverrides("fieldcam,field-cameras,120000\n# comment\n");
  assert.deepEqual(tagMetadata("fieldcam", overrides), {
    dataset: "field-cameras",
    size: 120_000,
  });
  assert.throws(() => parseOverrides("bad line"), /expected tag,dataset,size/);
});

test("forward output is finite for random inputs", () => {
  const gen = new Xoshiro256(1n);
  for (const spec of ZOO) {
    const model = loadModel(spec);
    const image = new Float64Array(spec.inputSize * spec.inputSize * 3);
    for (let i = 0; i < image.length; i++) image[i] = gen.nextDouble();
    const [features] = model.forward([image], spec.inputSize);
    assert.equal(features.length, spec.featureDim);
    for (const value of features) assert.ok(Number.isFinite(value));
  }
});
