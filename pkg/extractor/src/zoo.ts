/**
 * Built-in zoo of tiny deterministic backbones.
 *
 * Sandboxed machines cannot download real pretrained weights, so the zoo
 * materializes each model's parameters from the portable generator seeded
 * with the model's name: the same name always yields the same weights, the
 * same features, and the same parameter count, on any machine.
 *
 * Naming convention mirrors common zoo tags: `{family}_{width}.{tag}`,
 * where the tag names the pretraining dataset.  Tag metadata comes from a
 * built-in table plus an optional user override CSV; unknown tags map to
 * dataset "unknown" with size 0, which size-ordered sampling strategies
 * visit last.
 */

import { Xoshiro256, fnv1a64 } from "./rng";

export interface TensorSpec {
  name: string;
  shape: number[];
}

export interface ModelSpec {
  id: string;
  family: "micro_mlp" | "micro_conv" | "micro_patch";
  /** preprocessing: resize to inputSize, normalize (v - mean) / std */
  inputSize: number;
  grayscale: boolean;
  mean: number;
  std: number;
  /** family width knob: hidden units / conv channels / patch size */
  width: number;
  featureDim: number;
  tag: string;
}

export interface Model {
  spec: ModelSpec;
  tensors: { spec: TensorSpec; values: Float64Array }[];
  paramCount: number;
  forward(batch: Float64Array[], inputSize: number): Float64Array[];
}

const BUILTIN_TAGS: Record<string, { dataset: string; size: number }> = {
  web400m: { dataset: "web-crawl", size: 400_000_000 },
  photos1m: { dataset: "photos", size: 1_000_000 },
  scans50k: { dataset: "scans", size: 50_000 },
};

export const ZOO: ModelSpec[] = [
  { id: "micro_mlp_16.web400m", family: "micro_mlp", inputSize: 8, grayscale: true, mean: 0.5, std: 0.25, width: 16, featureDim: 24, tag: "web400m" },
  { id: "micro_mlp_32.fieldcam", family: "micro_mlp", inputSize: 8, grayscale: true, mean: 0.5, std: 0.25, width: 32, featureDim: 24, tag: "fieldcam" },
  { id: "micro_conv_8.photos1m", family: "micro_conv", inputSize: 12, grayscale: false, mean: 0.45, std: 0.27, width: 8, featureDim: 32, tag: "photos1m" },
  { id: "micro_conv_12.web400m", family: "micro_conv", inputSize: 12, grayscale: false, mean: 0.45, std: 0.27, width: 12, featureDim: 32, tag: "web400m" },
  { id: "micro_patch_4.scans50k", family: "micro_patch", inputSize: 16, grayscale: false, mean: 0.5, std: 0.3, width: 4, featureDim: 40, tag: "scans50k" },
];

export function resolveModels(patterns: string[]): ModelSpec[] {
  const out: ModelSpec[] = [];
  for (const pattern of patterns) {
    const regex = new RegExp(
      "^" + pattern.split("*").map(escapeRegex).join(".*") + "$"
    );
    const matched = ZOO.filter((m) => regex.test(m.id));
    if (matched.length === 0) {
      const names = ZOO.map((m) => m.id).join(", ");
      throw new Error(`no zoo model matches ${JSON.stringify(pattern)}; available: ${names}`);
    }
    for (const m of matched) {
      if (!out.includes(m)) out.push(m);
    }
  }
  return out;
}

function escapeRegex(s: string): string {
  return s.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

export function tagMetadata(
  tag: string,
  overrides: Record<string, { dataset: string; size: number }> = {}
): { dataset: string; size: number } {
  if (tag in overrides) return overrides[tag];
  if (tag in BUILTIN_TAGS) return BUILTIN_TAGS[tag];
  return { dataset: "unknown", size: 0 };
}

/** Parse an override CSV with lines `tag,dataset,size`. */
export function parseOverrides(text: string): Record<string, { dataset: string; size: number }> {
  const out: Record<string, { dataset: string; size: number }> = {};
  for (const [index, raw] of text.split("\n").entries()) {
    const line = raw.trim();
    if (!line || line.startsWith("#")) continue;
    const parts = line.split(",");
    if (parts.length !== 3 || !/^\d+$/.test(parts[2].trim())) {
      throw new Error(`override csv line ${index + 1}: expected tag,dataset,size`);
    }
    out[parts[0].trim()] = { dataset: parts[1].trim(), size: parseInt(parts[2].trim(), 10) };
  }
  return out;
}

export function tensorSpecs(spec: ModelSpec): TensorSpec[] {
  const inDim = spec.inputSize * spec.inputSize * (spec.grayscale ? 1 : 3);
  switch (spec.family) {
    case "micro_mlp":
      return [
        { name: "hidden.weight", shape: [spec.width, inDim] },
        { name: "hidden.bias", shape: [spec.width] },
        { name: "head.weight", shape: [spec.featureDim, spec.width] },
        { name: "head.bias", shape: [spec.featureDim] },
      ];
    case "micro_conv":
      return [
        { name: "conv.weight", shape: [spec.width, 3, 3, 3] },
        { name: "conv.bias", shape: [spec.width] },
        { name: "head.weight", shape: [spec.featureDim, spec.width] },
        { name: "head.bias", shape: [spec.featureDim] },
      ];
    case "micro_patch": {
      const patchDim = spec.width * spec.width * 3;
      return [
        { name: "embed.weight", shape: [spec.featureDim, patchDim] },
        { name: "embed.bias", shape: [spec.featureDim] },
      ];
    }
  }
}

function tensorSize(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}

/** Materialize weights from the name-derived seed, in declared tensor order. */
export function loadModel(spec: ModelSpec): Model {
  const gen = new Xoshiro256(fnv1a64(spec.id));
  const tensors = tensorSpecs(spec).map((t) => {
    const size = tensorSize(t.shape);
    const fanOut = t.shape[0];
    const fanIn = t.shape.length > 1 ? size / fanOut : fanOut;
    const scale = Math.sqrt(6 / (fanIn + fanOut));
    const values = new Float64Array(size);
    for (let i = 0; i < size; i++) values[i] = gen.nextSymmetric(scale);
    return { spec: t, values };
  });
  const paramCount = tensors.reduce((a, t) => a + t.values.length, 0);
  return { spec, tensors, paramCount, forward: makeForward(spec, tensors) };
}

type Tensors = { spec: TensorSpec; values: Float64Array }[];

function makeForward(spec: ModelSpec, tensors: Tensors) {
  return (batch: Float64Array[], inputSize: number): Float64Array[] =>
    batch.map((rgb) => forwardOne(spec, tensors, rgb, inputSize));
}

function forwardOne(
  spec: ModelSpec,
  tensors: Tensors,
  rgb: Float64Array,
  size: number
): Float64Array {
  // Normalize; collapse to grayscale when the family wants one channel.
  const channels = spec.grayscale ? 1 : 3;
  const x = new Float64Array(size * size * channels);
  for (let i = 0; i < size * size; i++) {
    if (spec.grayscale) {
      const v = (rgb[i * 3] + rgb[i * 3 + 1] + rgb[i * 3 + 2]) / 3;
      x[i] = (v - spec.mean) / spec.std;
    } else {
      x[i * 3] = (rgb[i * 3] - spec.mean) / spec.std;
      x[i * 3 + 1] = (rgb[i * 3 + 1] - spec.mean) / spec.std;
      x[i * 3 + 2] = (rgb[i * 3 + 2] - spec.mean) / spec.std;
    }
  }

  switch (spec.family) {
    case "micro_mlp": {
      const [w1, b1, w2, b2] = tensors.map((t) => t.values);
      const hidden = new Float64Array(spec.width);
      const inDim = x.length;
      for (let h = 0; h < spec.width; h++) {
        let acc = b1[h];
        for (let i = 0; i < inDim; i++) acc += w1[h * inDim + i] * x[i];
        hidden[h] = acc > 0 ? acc : 0;
      }
      return dense(w2, b2, hidden, spec.featureDim);
    }
    case "micro_conv": {
      const [wc, bc, w2, b2] = tensors.map((t) => t.values);
      const outSize = size - 2; // 3x3 valid convolution
      const pooled = new Float64Array(spec.width);
      for (let c = 0; c < spec.width; c++) {
        let sum = 0;
        for (let y = 0; y < outSize; y++) {
          for (let xx = 0; xx < outSize; xx++) {
            let acc = bc[c];
            for (let ch = 0; ch < 3; ch++) {
              for (let ky = 0; ky < 3; ky++) {
                for (let kx = 0; kx < 3; kx++) {
                  const pixel = x[((y + ky) * size + (xx + kx)) * 3 + ch];
                  acc += wc[((c * 3 + ch) * 3 + ky) * 3 + kx] * pixel;
                }
              }
            }
            sum += acc > 0 ? acc : 0; // ReLU then global average pool
          }
        }
        pooled[c] = sum / (outSize * outSize);
      }
      return dense(w2, b2, pooled, spec.featureDim);
    }
    case "micro_patch": {
      const [we, be] = tensors.map((t) => t.values);
      const p = spec.width;
      const perSide = size / p;
      const patchDim = p * p * 3;
      const out = new Float64Array(spec.featureDim);
      const patch = new Float64Array(patchDim);
      for (let py = 0; py < perSide; py++) {
        for (let px = 0; px < perSide; px++) {
          let k = 0;
          for (let y = 0; y < p; y++) {
            for (let xx = 0; xx < p; xx++) {
              const src = ((py * p + y) * size + (px * p + xx)) * 3;
              patch[k++] = x[src];
              patch[k++] = x[src + 1];
              patch[k++] = x[src + 2];
            }
          }
          for (let f = 0; f < spec.featureDim; f++) {
            let acc = be[f];
            for (let i = 0; i < patchDim; i++) acc += we[f * patchDim + i] * patch[i];
            out[f] += acc;
          }
        }
      }
      const patches = perSide * perSide;
      for (let f = 0; f < spec.featureDim; f++) out[f] /= patches;
      return out;
    }
  }
}

function dense(w: Float64Array, b: Float64Array, x: Float64Array, outDim: number): Float64Array {
  const out = new Float64Array(outDim);
  const inDim = x.length;
  for (let o = 0; o < outDim; o++) {
    let acc = b[o];
    for (let i = 0; i < inDim; i++) acc += w[o * inDim + i] * x[i];
    out[o] = acc;
  }
  return out;
}

/** Feature width probed with one forward pass on a blank input. */
export function probeFeatureDim(model: Model): number {
  const blank = new Float64Array(model.spec.inputSize * model.spec.inputSize * 3);
  const [features] = model.forward([blank], model.spec.inputSize);
  return features.length;
}
